#pragma once

#include <string>
#include <vector>

#include "rerm/model.hpp"

namespace rerm {

// Rational expectations over the spectral measure with denominator
// D = lambda w + Vhat omega + Phat zeta. The regulariser is (lambda/2) w' Sigma_w w
// and the dual-norm penalty enters as (Phat/2) w' Sigma_zeta w.
Overlaps nonhat_update_maha(const ConjugateOverlaps& hats, double lambda,
                            const SpectralMeasure& measure);

// One atom per block. Every block list is trace-normalised against phi
// (weighted mean 1). Teacher atoms are theta_bar^2 = omega^2 theta.
SpectralMeasure swfm_measure(const std::vector<double>& phi,
                             const std::vector<double>& omega_blocks,
                             const std::vector<double>& zeta_blocks,
                             const std::vector<double>& theta_blocks,
                             const std::vector<double>& w_blocks);

// Reference two-block model: Sigma_x = Sigma_theta = I, Sigma_delta = (1, 2.5).
enum class SwfmCase { w_equals_delta, l2, w_equals_delta_inverse };

struct SwfmTable {
  std::vector<double> phi{0.5, 0.5};
  std::vector<double> omega{1.0, 1.0};
  std::vector<double> delta{1.0, 2.5};
  std::vector<double> theta{1.0, 1.0};
};

std::vector<double> swfm_case_weights(const SwfmTable& t, SwfmCase c);
const char* to_string(SwfmCase c);

SwfmCase parse_swfm_case(const std::string& s);

// The attack ball is {delta : delta' Sigma_delta delta <= eps^2}, so the
// penalty matrix Sigma_zeta is the inverse of the trace-normalised Sigma_delta.
SpectralMeasure swfm_table_measure(const SwfmTable& t, const std::vector<double>& w_blocks);
SpectralMeasure swfm_case_measure(const SwfmTable& t, SwfmCase c);

}  // namespace rerm

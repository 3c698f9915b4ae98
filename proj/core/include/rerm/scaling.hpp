#pragma once

#include <span>
#include <string>
#include <vector>

#include "rerm/model.hpp"
#include "rerm/solver.hpp"

namespace rerm {

// n points from lo to hi, equally spaced in log.
std::vector<double> geometric_grid(double lo, double hi, int n);

// log y = intercept + slope log x by least squares.
struct PowerFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};
PowerFit fit_power_law(std::span<const double> x, std::span<const double> y);

struct ScalingPoint {
  double alpha = 0;
  Overlaps overlaps;
  ErrorReport report;
  bool converged = false;
};

struct ScalingFit {
  std::vector<ScalingPoint> points;  // ascending alpha
  PowerFit m, q, V, P;
  std::size_t n_fit = 0;  // smallest-alpha points used in the fit
  bool complete = false;  // every grid point converged
  double min_r2() const;
};

struct ScalingSettings {
  double fit_fraction = 0.5;
  SolverSettings solver;
};

// Solves descending in alpha with warm starts and fits on the smallest
// fit_fraction of the grid. Stops at the first non-converged point; the fit is
// then left empty and complete = false.
ScalingFit fit_scaling_exponents(const ProblemConfig& cfg, std::vector<double> alpha_grid,
                                 const ScalingSettings& s = {});
// Fit step alone, on externally supplied points.
ScalingFit fit_points(std::vector<ScalingPoint> points, double fit_fraction);

enum class BoundaryRegime { vanishing, constant, growing };
std::string to_string(BoundaryRegime r);

struct LeadingOrder {
  // E_gen ~ 1/2 - gen_coeff alpha^gen_exponent
  double gen_coeff = 0, gen_exponent = 0;
  // E_bnd ~ bnd_coeff alpha^bnd_exponent + bnd2_coeff alpha^bnd2_exponent
  double bnd_coeff = 0, bnd_exponent = 0;
  double bnd2_coeff = 0, bnd2_exponent = 0;
  BoundaryRegime regime = BoundaryRegime::constant;

  double e_gen(double alpha) const;
  double e_bnd(double alpha) const;
};

// Small-alpha expansions in the noiseless case; exponent differences within
// tol of zero count as equal.
LeadingOrder leading_order_errors(const ScalingFit& fit, const ProblemConfig& cfg,
                                  double tol = 0.05);

}  // namespace rerm

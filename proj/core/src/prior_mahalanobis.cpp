#include "rerm/prior_mahalanobis.hpp"

#include <cmath>
#include <stdexcept>

namespace rerm {

Overlaps nonhat_update_maha(const ConjugateOverlaps& h, double lambda,
                            const SpectralMeasure& measure) {
  Overlaps out{0, 0, 0, 0};
  const double m2 = h.mhat * h.mhat;
  for (const auto& a : measure.atoms) {
    double D = lambda * a.w + h.Vhat * a.omega + h.Phat * a.zeta;
    if (!(D > 0)) throw std::domain_error("nonhat_update_maha: nonpositive denominator");
    double D2 = D * D;
    out.m += a.weight * h.mhat * a.theta_bar_sq / D;
    out.q += a.weight * (m2 * a.theta_bar_sq * a.omega + h.qhat * a.omega * a.omega) / D2;
    out.V += a.weight * a.omega / D;
    out.P += a.weight * a.zeta * (m2 * a.theta_bar_sq + h.qhat * a.omega) / D2;
  }
  return out;
}

namespace {

std::vector<double> normalised(const std::vector<double>& phi, const std::vector<double>& v) {
  if (v.size() != phi.size()) throw ConfigError("swfm block lists must match phi in length");
  double mean = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0)) throw ConfigError("swfm block values must be positive");
    mean += phi[i] * v[i];
  }
  std::vector<double> out(v);
  for (double& x : out) x /= mean;
  return out;
}

}  // namespace

SpectralMeasure swfm_measure(const std::vector<double>& phi,
                             const std::vector<double>& omega_blocks,
                             const std::vector<double>& zeta_blocks,
                             const std::vector<double>& theta_blocks,
                             const std::vector<double>& w_blocks) {
  if (phi.empty()) throw ConfigError("swfm needs at least one block");
  double total = 0.0;
  for (double f : phi) {
    if (!(f >= 0)) throw ConfigError("swfm block fractions must be nonnegative");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("swfm block fractions must sum to 1");
  auto om = normalised(phi, omega_blocks);
  auto ze = normalised(phi, zeta_blocks);
  auto th = normalised(phi, theta_blocks);
  auto ww = normalised(phi, w_blocks);
  SpectralMeasure mu;
  for (std::size_t i = 0; i < phi.size(); ++i)
    mu.atoms.push_back({om[i] * om[i] * th[i], om[i], ze[i], ww[i], phi[i]});
  mu.validate();
  return mu;
}

std::vector<double> swfm_case_weights(const SwfmTable& t, SwfmCase c) {
  switch (c) {
    case SwfmCase::w_equals_delta:
      return t.delta;
    case SwfmCase::l2:
      return std::vector<double>(t.delta.size(), 1.0);
    case SwfmCase::w_equals_delta_inverse: {
      std::vector<double> inv(t.delta);
      for (double& x : inv) x = 1.0 / x;
      return inv;
    }
  }
  return {};
}

const char* to_string(SwfmCase c) {
  switch (c) {
    case SwfmCase::w_equals_delta: return "sigma_w=sigma_delta";
    case SwfmCase::l2: return "l2";
    case SwfmCase::w_equals_delta_inverse: return "sigma_w=sigma_delta_inv";
  }
  return "";
}

SwfmCase parse_swfm_case(const std::string& s) {
  for (SwfmCase c : {SwfmCase::w_equals_delta, SwfmCase::l2, SwfmCase::w_equals_delta_inverse})
    if (s == to_string(c)) return c;
  throw ConfigError("unknown swfm case '" + s + "'");
}

SpectralMeasure swfm_table_measure(const SwfmTable& t, const std::vector<double>& w_blocks) {
  auto delta = normalised(t.phi, t.delta);
  SpectralMeasure mu = swfm_measure(t.phi, t.omega, t.delta, t.theta, w_blocks);
  // swfm_measure normalises zeta; the penalty matrix is the plain inverse.
  for (std::size_t i = 0; i < mu.atoms.size(); ++i) mu.atoms[i].zeta = 1.0 / delta[i];
  return mu;
}

SpectralMeasure swfm_case_measure(const SwfmTable& t, SwfmCase c) {
  return swfm_table_measure(t, swfm_case_weights(t, c));
}

}  // namespace rerm

#include "rerm/model.hpp"

#include <algorithm>
#include <cmath>

namespace rerm {

double dual_exponent(double p) {
  if (std::isinf(p)) return 1.0;
  if (p == 1.0) return kInf;
  if (!(p > 1.0)) throw ConfigError("norm order must be >= 1");
  return p / (p - 1.0);
}

void SpectralMeasure::validate() const {
  if (atoms.empty()) throw ConfigError("spectral measure has no atoms");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.omega > 0 && a.zeta > 0 && a.w > 0))
      throw ConfigError("spectral atom eigenvalues must be positive");
    if (!(a.theta_bar_sq >= 0)) throw ConfigError("theta_bar_sq must be nonnegative");
    if (!(a.weight >= 0)) throw ConfigError("atom weight must be nonnegative");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("atom weights must sum to 1");
}

double SpectralMeasure::rho() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight * a.theta_bar_sq / a.omega;
  return s;
}

double ProblemConfig::teacher_rho() const {
  if (geometry == Geometry::mahalanobis) return measure.rho();
  return prior.second_moment();
}

ProblemConfig validate_config(ProblemConfig cfg) {
  if (!(cfg.alpha > 0)) throw ConfigError("alpha must be positive");
  if (!(cfg.eps >= 0)) throw ConfigError("eps must be nonnegative");
  if (!(cfg.lambda > 0)) throw ConfigError("lambda must be positive");
  if (!(cfg.norms.p > 1.0)) throw ConfigError("attack norm p must lie in (1, inf]");
  if (!(cfg.norms.r >= 1.0) || std::isinf(cfg.norms.r))
    throw ConfigError("regularization order r must lie in [1, inf)");
  cfg.norms.pstar = dual_exponent(cfg.norms.p);
  if (!(cfg.channel.noise >= 0)) throw ConfigError("channel noise must be nonnegative");
  switch (cfg.prior.kind) {
    case PriorSpec::Kind::gaussian:
      if (!(cfg.prior.rho > 0)) throw ConfigError("gaussian prior variance must be positive");
      break;
    case PriorSpec::Kind::sparse_binary:
      // rho = 1 gives the all-zero teacher, which has no signal to learn.
      if (!(cfg.prior.rho > 0 && cfg.prior.rho < 1))
        throw ConfigError("sparse_binary rho must lie in (0, 1)");
      break;
  }
  if (cfg.geometry == Geometry::mahalanobis) {
    if (cfg.norms.p != 2.0 || cfg.norms.r != 2.0)
      throw ConfigError("mahalanobis geometry requires p = r = 2");
    if (cfg.prior.kind != PriorSpec::Kind::gaussian)
      throw ConfigError("mahalanobis geometry requires a gaussian prior");
    cfg.measure.validate();
  }
  return cfg;
}

void check_overlaps(const Overlaps& ov, double rho, double tol) {
  if (!(ov.q > 0)) throw std::domain_error("overlap q must be positive");
  if (!(ov.V > 0)) throw std::domain_error("overlap V must be positive");
  if (!(ov.P >= 0)) throw std::domain_error("overlap P must be nonnegative");
  if (ov.m * ov.m > rho * ov.q * (1.0 + tol))
    throw std::domain_error("overlaps violate m^2 <= rho q");
}

double lp_norm(std::span<const double> v, double p) {
  if (std::isinf(p)) {
    double mx = 0.0;
    for (double x : v) mx = std::max(mx, std::abs(x));
    return mx;
  }
  if (p == 1.0) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
  }
  if (p == 2.0) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  }
  // Scale by the max entry so large p does not overflow.
  double mx = 0.0;
  for (double x : v) mx = std::max(mx, std::abs(x));
  if (mx == 0.0) return 0.0;
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x) / mx, p);
  return mx * std::pow(s, 1.0 / p);
}

std::string to_string(Loss loss) { return loss == Loss::logistic ? "logistic" : "hinge"; }
std::string to_string(Geometry g) { return g == Geometry::lp ? "lp" : "mahalanobis"; }
std::string to_string(ChannelSpec::Kind k) {
  return k == ChannelSpec::Kind::probit ? "probit" : "noisy_sign";
}
std::string to_string(PriorSpec::Kind k) {
  return k == PriorSpec::Kind::gaussian ? "gaussian" : "sparse_binary";
}

Loss parse_loss(const std::string& s) {
  if (s == "logistic") return Loss::logistic;
  if (s == "hinge") return Loss::hinge;
  throw ConfigError("unknown loss '" + s + "'");
}

Geometry parse_geometry(const std::string& s) {
  if (s == "lp") return Geometry::lp;
  if (s == "mahalanobis") return Geometry::mahalanobis;
  throw ConfigError("unknown geometry '" + s + "'");
}

}  // namespace rerm

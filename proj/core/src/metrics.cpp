#include "rerm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rerm/scalar.hpp"

namespace rerm {

double e_gen(double m, double q, double rho, double tau) {
  if (!(q > 0)) throw std::domain_error("e_gen needs q > 0");
  double c = m / std::sqrt((rho + tau * tau) * q);
  if (std::abs(c) > 1.0 + 1e-9) throw std::domain_error("e_gen: cosine outside [-1, 1]");
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c) / std::numbers::pi;
}

double e_bnd(double m, double q, double P, double rho, double tau, double eps, double pstar) {
  if (!(q > 0)) throw std::domain_error("e_bnd needs q > 0");
  if (!(P >= 0)) throw std::domain_error("e_bnd needs P >= 0");
  if (eps == 0.0 || P == 0.0) return 0.0;
  double var = rho + tau * tau - m * m / q;
  if (var < -1e-10) throw std::domain_error("e_bnd: negative conditional variance");
  double upper = eps * (pstar == 1.0 ? P : std::pow(P, 1.0 / pstar)) / std::sqrt(q);
  double a = m / std::sqrt(q);
  if (var <= 1e-300) {
    // Labels fully determined by the student field.
    double half = normal_cdf(upper) - 0.5;
    return a > 0 ? 2.0 * half : (a < 0 ? 0.0 : half);
  }
  double scale = std::sqrt(2.0 * var);
  auto f = [&](double nu) { return std::erfc(-a * nu / scale) * normal_pdf(nu); };
  return adaptive_integral(f, 0.0, upper, 1e-10);
}

double teacher_margin(double rho, double tau) {
  return std::sqrt(2.0 / std::numbers::pi) * std::sqrt(rho) / std::sqrt(1.0 + tau * tau / rho);
}

ErrorReport error_report(const Overlaps& ov, const ProblemConfig& cfg) {
  return error_report(ov, cfg, cfg.teacher_rho());
}

ErrorReport error_report(const Overlaps& ov, const ProblemConfig& cfg, double rho) {
  const double tau = std::sqrt(cfg.channel.tau_sq());
  const double pstar = cfg.geometry == Geometry::mahalanobis ? 2.0 : cfg.norms.pstar;
  ErrorReport r;
  r.e_gen = e_gen(ov.m, ov.q, rho, tau);
  r.e_bnd = e_bnd(ov.m, ov.q, ov.P, rho, tau, cfg.eps, pstar);
  r.e_rob = r.e_gen + r.e_bnd;
  r.teacher_margin = teacher_margin(rho, tau);
  return r;
}

double rad_bound_generic(double max_dual_x, double W, double sigma_sc, int n, double eps,
                         double sup_dual_w) {
  double sn = std::sqrt(static_cast<double>(n));
  return max_dual_x * W * std::sqrt(2.0 / (sigma_sc * n)) + eps / (2.0 * sn) * sup_dual_w;
}

double rad_bound_l2_maha(double max_x2, double W2, int n, double eps,
                         double lambda_min_sigma_delta) {
  double sn = std::sqrt(static_cast<double>(n));
  return max_x2 * W2 / sn + eps * W2 / (2.0 * sn) * std::sqrt(1.0 / lambda_min_sigma_delta);
}

double rad_bound_commuting(double max_x_Ainv, double WA, int n, double eps,
                           std::span<const double> lambda_alpha_products) {
  if (lambda_alpha_products.empty())
    throw std::invalid_argument("rad_bound_commuting needs at least one product");
  double worst = 0.0;
  for (double p : lambda_alpha_products) {
    if (!(p > 0)) throw std::invalid_argument("rad_bound_commuting needs positive products");
    worst = std::max(worst, 1.0 / p);
  }
  double sn = std::sqrt(static_cast<double>(n));
  return WA * max_x_Ainv / sn + eps * WA / (2.0 * sn) * std::sqrt(worst);
}

double rad_bound_lp(double rad_clean, double eps, int d, double p, double r_norm, int n) {
  double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  double inv_r = std::isinf(r_norm) ? 0.0 : 1.0 / r_norm;
  double factor = std::max(std::pow(static_cast<double>(d), 1.0 - inv_r - inv_p), 1.0);
  return rad_clean + eps * factor / (2.0 * std::sqrt(static_cast<double>(n)));
}

double rad_commuting_witness_term(std::span<const double> lambdas,
                                  std::span<const double> alphas, double WA, int n,
                                  double eps) {
  if (lambdas.size() != alphas.size() || lambdas.empty())
    throw std::invalid_argument("witness needs matching nonempty spectra");
  std::size_t j = 0;
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    if (lambdas[i] * alphas[i] < lambdas[j] * alphas[j]) j = i;
  std::vector<double> w(lambdas.size(), 0.0);
  w[j] = WA / std::sqrt(alphas[j]);
  double dual_sq = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) dual_sq += w[i] * w[i] / lambdas[i];
  return eps / (2.0 * std::sqrt(static_cast<double>(n))) * std::sqrt(dual_sq);
}

}  // namespace rerm

#include "rerm/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "rerm/metrics.hpp"

namespace rerm {

std::vector<double> geometric_grid(double lo, double hi, int n) {
  if (!(lo > 0 && hi > lo) || n < 2) throw ConfigError("geometric grid needs 0 < lo < hi, n >= 2");
  std::vector<double> g(static_cast<std::size_t>(n));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

PowerFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_power_law needs two or more paired points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0 && y[i] > 0)) throw std::domain_error("fit_power_law needs positive data");
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = std::log(x[i]) - mx, dy = std::log(y[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  PowerFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = syy - f.slope * sxy;
  f.r2 = syy > 0 ? 1.0 - std::max(ss_res, 0.0) / syy : 1.0;
  return f;
}

double ScalingFit::min_r2() const { return std::min({m.r2, q.r2, V.r2, P.r2}); }

ScalingFit fit_points(std::vector<ScalingPoint> points, double fit_fraction) {
  if (!(fit_fraction > 0 && fit_fraction <= 1)) throw ConfigError("fit fraction must lie in (0, 1]");
  std::sort(points.begin(), points.end(),
            [](const ScalingPoint& a, const ScalingPoint& b) { return a.alpha < b.alpha; });
  ScalingFit out;
  out.points = std::move(points);
  out.complete = std::all_of(out.points.begin(), out.points.end(),
                             [](const ScalingPoint& p) { return p.converged; });
  if (!out.complete) return out;
  std::size_t k = static_cast<std::size_t>(std::ceil(fit_fraction * out.points.size()));
  k = std::clamp<std::size_t>(k, 2, out.points.size());
  out.n_fit = k;
  std::vector<double> a(k), m(k), q(k), V(k), P(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& p = out.points[i];
    a[i] = p.alpha;
    m[i] = p.overlaps.m;
    q[i] = p.overlaps.q;
    V[i] = p.overlaps.V;
    P[i] = p.overlaps.P;
  }
  out.m = fit_power_law(a, m);
  out.q = fit_power_law(a, q);
  out.V = fit_power_law(a, V);
  out.P = fit_power_law(a, P);
  return out;
}

ScalingFit fit_scaling_exponents(const ProblemConfig& cfg, std::vector<double> alpha_grid,
                                 const ScalingSettings& s) {
  if (alpha_grid.size() < 8) throw ConfigError("scaling fit needs at least 8 grid points");
  std::sort(alpha_grid.begin(), alpha_grid.end(), std::greater<>());
  std::vector<ScalingPoint> pts;
  std::optional<SolveResult> chain;
  for (double a : alpha_grid) {
    ProblemConfig c = cfg;
    c.alpha = a;
    c = validate_config(c);
    SolveResult r = chain ? solve_fixed_point(c, s.solver, *chain) : solve_fixed_point(c, s.solver);
    if (!r.converged && chain) r = solve_fixed_point(c, s.solver);
    ScalingPoint p{a, r.overlaps, {}, r.converged};
    if (r.converged) {
      p.report = error_report(r.overlaps, c);
      chain = r;
    }
    pts.push_back(p);
    if (!r.converged) break;
  }
  return fit_points(std::move(pts), s.fit_fraction);
}

std::string to_string(BoundaryRegime r) {
  switch (r) {
    case BoundaryRegime::vanishing: return "vanishing";
    case BoundaryRegime::constant: return "constant";
    case BoundaryRegime::growing: return "growing";
  }
  return "";
}

double LeadingOrder::e_gen(double alpha) const {
  return 0.5 - gen_coeff * std::pow(alpha, gen_exponent);
}

double LeadingOrder::e_bnd(double alpha) const {
  return bnd_coeff * std::pow(alpha, bnd_exponent) + bnd2_coeff * std::pow(alpha, bnd2_exponent);
}

LeadingOrder leading_order_errors(const ScalingFit& fit, const ProblemConfig& cfg, double tol) {
  if (!fit.complete || fit.n_fit == 0) throw std::invalid_argument("leading_order_errors needs a complete fit");
  const double rho = cfg.teacher_rho();
  const double ps = cfg.geometry == Geometry::mahalanobis ? 2.0 : cfg.norms.pstar;
  const double m0 = std::exp(fit.m.intercept), q0 = std::exp(fit.q.intercept);
  const double P0 = std::exp(fit.P.intercept);
  const double dm = fit.m.slope, dq = fit.q.slope, dP = fit.P.slope;
  const double pi = std::numbers::pi;

  LeadingOrder lo;
  lo.gen_coeff = m0 / (pi * std::sqrt(rho * q0));
  lo.gen_exponent = dm - 0.5 * dq;
  // Expanding erfc(-a nu / sqrt(2 rho)) to first order in a = m / sqrt(q) under
  // the upper limit U = eps P^{1/p*} / sqrt(q).
  lo.bnd_coeff = cfg.eps * std::pow(P0, 1.0 / ps) / std::sqrt(2.0 * pi * q0);
  lo.bnd_exponent = dP / ps - 0.5 * dq;
  lo.bnd2_coeff = cfg.eps * cfg.eps * m0 * std::pow(P0, 2.0 / ps) /
                  (2.0 * pi * std::sqrt(rho) * std::pow(q0, 1.5));
  lo.bnd2_exponent = dm + 2.0 * dP / ps - 1.5 * dq;
  if (lo.bnd_exponent > tol) lo.regime = BoundaryRegime::vanishing;
  else if (lo.bnd_exponent < -tol) lo.regime = BoundaryRegime::growing;
  else lo.regime = BoundaryRegime::constant;
  return lo;
}

}  // namespace rerm

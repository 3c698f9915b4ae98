#include "rerm/prior_lp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rerm/scalar.hpp"

namespace rerm {

ZwValue zw(const PriorSpec& prior, double gamma, double Lambda) {
  ZwLog l = zw_log(prior, gamma, Lambda);
  double v = std::exp(l.log_value);
  return {v, v * l.dlog};
}

ZwLog zw_log(const PriorSpec& prior, double gamma, double Lambda) {
  const double rho = prior.rho;
  if (prior.kind == PriorSpec::Kind::gaussian) {
    double a = rho * Lambda + 1.0;
    if (!(a > 0)) throw std::domain_error("zw: gaussian prior needs Lambda + 1/rho > 0");
    return {rho * gamma * gamma / (2.0 * a) - 0.5 * std::log(a), rho * gamma / a};
  }
  // log(rho + (1 - rho) e^{-Lambda/2} cosh gamma) without overflow
  double ag = std::abs(gamma);
  double lb = std::log1p(-rho) - 0.5 * Lambda + ag + std::log1p(std::exp(-2.0 * ag)) -
              std::numbers::ln2;
  double la = std::log(rho);
  double hi = std::max(la, lb);
  double lz = hi + std::log(std::exp(la - hi) + std::exp(lb - hi));
  // d/dgamma: (1 - rho) e^{-Lambda/2} sinh gamma / Z
  double th = std::tanh(ag);
  double dlog = std::copysign(th * std::exp(lb - lz), gamma);
  return {lz, dlog};
}

double f_w(double gamma, double phat, double lambda, double Lambda, double r, double pstar) {
  return power_prox(gamma, Lambda, lambda, r, phat, pstar);
}

double df_w_dgamma(double gamma, double phat, double lambda, double Lambda, double r,
                   double pstar) {
  double z = power_prox(gamma, Lambda, lambda, r, phat, pstar);
  return power_prox_derivative(z, Lambda, lambda, r, phat, pstar);
}

namespace {

struct TeacherArgs {
  double slope;   // gamma_teacher = slope * xi
  double Lambda;
};

TeacherArgs teacher_args(const ConjugateOverlaps& h, ZwConvention c) {
  double s = h.mhat / std::sqrt(h.qhat);
  return {s, c == ZwConvention::squared_ratio ? s * s : s};
}

// Integrands divided by Z_w, plus log Z_w.
struct Scaled {
  Overlaps v;
  double log_zw;
};

Scaled integrand(double xi, const ConjugateOverlaps& h, const ProblemConfig& cfg,
                 const NonhatOptions& opt, const TeacherArgs& t) {
  const double r = cfg.norms.r, ps = cfg.norms.pstar, lam = cfg.lambda;
  ZwLog z = zw_log(cfg.prior, t.slope * xi, t.Lambda);
  double gamma = std::sqrt(h.qhat) * xi;
  double f = f_w(gamma, h.Phat, lam, h.Vhat, r, ps);
  double df;
  if (opt.finite_difference) {
    const double eps = 1e-6;
    df = (f_w(gamma + eps, h.Phat, lam, h.Vhat, r, ps) -
          f_w(gamma - eps, h.Phat, lam, h.Vhat, r, ps)) / (2.0 * eps);
  } else {
    df = power_prox_derivative(f, h.Vhat, lam, r, h.Phat, ps);
  }
  double af = std::abs(f);
  double fp = ps == 1.0 ? af : (ps == 2.0 ? af * af : std::pow(af, ps));
  return {{z.dlog * f, f * f, df, fp}, z.log_value};
}

}  // namespace

Overlaps nonhat_integrand(double xi, const ConjugateOverlaps& hats, const ProblemConfig& cfg,
                          const NonhatOptions& opt) {
  if (!(hats.qhat > 0)) throw std::domain_error("nonhat_update_lp: qhat must be positive");
  Scaled v = integrand(xi, hats, cfg, opt, teacher_args(hats, opt.convention));
  double z = std::exp(v.log_zw);
  return {z * v.v.m, z * v.v.q, z * v.v.V, z * v.v.P};
}

Overlaps nonhat_update_lp(const ConjugateOverlaps& hats, const ProblemConfig& cfg,
                          const NonhatOptions& opt) {
  if (!(hats.qhat > 0)) throw std::domain_error("nonhat_update_lp: qhat must be positive");
  if (!(hats.Vhat > 0)) throw std::domain_error("nonhat_update_lp: Vhat must be positive");
  const auto t = teacher_args(hats, opt.convention);
  // With the squared-ratio argument Z_w tilts N(0,1) towards N(0, 1 + rho2 eta),
  // so the rule is stretched to that width and reweighted by the density ratio.
  double s = 1.0;
  if (opt.convention == ZwConvention::squared_ratio)
    s = std::sqrt(1.0 + cfg.prior.second_moment() * t.Lambda);
  GaussHermiteRule panels;
  if (opt.quadrature == Quadrature::panels) {
    // f_w vanishes on |gamma| <= threshold and is non-analytic at its edge.
    PanelSpec spec;
    spec.nodes_per_panel = opt.panel_nodes;
    spec.breakpoints.push_back(0.0);
    double threshold = (cfg.norms.r == 1.0 ? cfg.lambda : 0.0) +
                       (cfg.norms.pstar == 1.0 ? hats.Phat : 0.0);
    const double to_u = 1.0 / (std::sqrt(hats.qhat) * s);
    if (threshold > 0) {
      spec.breakpoints.push_back(threshold * to_u);
      spec.breakpoints.push_back(-threshold * to_u);
    }
    // A term c|z|^e with 1 < e < 2 beats the quadratic only for
    // z < (c e / Vhat)^{1/(2-e)}, so f_w' climbs from 0 to about 1/Vhat within
    // a gamma-width of Vhat times that, next to 0 or the threshold. Terms with
    // e > 2 put a branch point of f_w just outside the threshold instead, so
    // the panels are graded there in every case.
    double width = 1e-3 / to_u;
    auto steep = [&](double c, double e) {
      if (c > 0 && e > 1.0 && e < 2.0)
        width = std::min(width, hats.Vhat * std::pow(c * e / hats.Vhat, 1.0 / (2.0 - e)));
    };
    steep(cfg.lambda, cfg.norms.r);
    steep(hats.Phat, cfg.norms.pstar);
    spec.refine_at.push_back(0.0);
    if (threshold > 0) {
      spec.refine_at.push_back(threshold * to_u);
      spec.refine_at.push_back(-threshold * to_u);
    }
    spec.refine_scale = std::max(width * to_u, 1e-10);
    panels = piecewise_gaussian_rule(spec);
  }
  const auto& rule =
      opt.quadrature == Quadrature::panels ? panels : gauss_hermite_rule(opt.nodes);
  Overlaps acc{0, 0, 0, 0};
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    double u = rule.nodes[i];
    Scaled v = integrand(s * u, hats, cfg, opt, t);
    double w = rule.weights[i] * s * std::exp(v.log_zw - 0.5 * (s * s - 1.0) * u * u);
    acc.m += w * v.v.m;
    acc.q += w * v.v.q;
    acc.V += w * v.v.V;
    acc.P += w * v.v.P;
  }
  return acc;
}

}  // namespace rerm

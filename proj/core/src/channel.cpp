#include "rerm/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rerm/scalar.hpp"

namespace rerm {

namespace {

constexpr double kPFloor = 1e-12;

double gaussian_density(double y, double mean, double var) {
  double d = y - mean;
  return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

ScalarFunction scaled_loss(Loss loss, double y, double shift) {
  return loss == Loss::logistic ? ScalarFunction::logistic_loss(y, shift)
                                : ScalarFunction::hinge_loss(y, shift);
}

}  // namespace

double z0(const ChannelSpec& channel, double y, double omega, double V) {
  if (channel.kind == ChannelSpec::Kind::probit) {
    double s2 = V + channel.noise * channel.noise;
    if (s2 <= 0) return y * omega > 0 ? 1.0 : (y * omega < 0 ? 0.0 : 0.5);
    return 0.5 * std::erfc(-y * omega / std::sqrt(2.0 * s2));
  }
  double up = V > 0 ? normal_cdf(omega / std::sqrt(V)) : (omega > 0 ? 1.0 : 0.0);
  return gaussian_density(y, 1.0, channel.noise) * up +
         gaussian_density(y, -1.0, channel.noise) * (1.0 - up);
}

double dz0_domega(const ChannelSpec& channel, double y, double omega, double V) {
  if (channel.kind == ChannelSpec::Kind::probit) {
    double s2 = V + channel.noise * channel.noise;
    if (s2 <= 0) return 0.0;
    double s = std::sqrt(s2);
    return y * normal_pdf(omega / s) / s;
  }
  if (V <= 0) return 0.0;
  double s = std::sqrt(V);
  return (gaussian_density(y, 1.0, channel.noise) - gaussian_density(y, -1.0, channel.noise)) *
         normal_pdf(omega / s) / s;
}

double f_g(Loss loss, double y, double omega, double V, double shift) {
  // Prox of V g(y . - shift) with unit V equals the prox of g at V.
  return (prox(scaled_loss(loss, y, shift), V, omega) - omega) / V;
}

double df_g_domega(Loss loss, double y, double omega, double V, double shift) {
  return (prox_derivative(scaled_loss(loss, y, shift), V, omega) - 1.0) / V;
}

double margin_shift(double P, const ProblemConfig& cfg) {
  if (cfg.eps == 0.0) return 0.0;
  if (cfg.geometry == Geometry::mahalanobis) return cfg.eps * std::sqrt(P);
  double ps = cfg.norms.pstar;
  return cfg.eps * (ps == 1.0 ? P : std::pow(P, 1.0 / ps));
}

double phat_prefactor(double P, const ProblemConfig& cfg) {
  if (cfg.eps == 0.0) return 0.0;
  double Pf = std::max(P, kPFloor);
  if (cfg.geometry == Geometry::mahalanobis) return cfg.eps / std::sqrt(Pf);
  double ps = cfg.norms.pstar;
  if (ps == 1.0) return cfg.eps;
  return cfg.eps / ps * std::pow(Pf, 1.0 / ps - 1.0);
}

HatIntegrand hat_integrand(double xi, const Overlaps& ov, const ProblemConfig& cfg,
                           const HatOptions& opt) {
  const double rho = cfg.teacher_rho();
  double var0 = rho - ov.m * ov.m / ov.q;
  if (var0 < -1e-10) throw std::domain_error("hat_update: rho - m^2/q is negative");
  var0 = std::max(var0, 0.0);
  const double shift = opt.decouple_dual_norm ? 0.0 : margin_shift(ov.P, cfg);
  const double sq = std::sqrt(ov.q);
  const double omega0 = ov.m / sq * xi;
  const double omega = sq * xi;

  HatIntegrand out;
  auto accumulate = [&](double y, double zw, double dzw) {
    double f, df;
    if (opt.finite_difference) {
      const double h = 1e-6;
      f = f_g(cfg.loss, y, omega, ov.V, shift);
      df = (f_g(cfg.loss, y, omega + h, ov.V, shift) - f_g(cfg.loss, y, omega - h, ov.V, shift)) /
           (2.0 * h);
    } else {
      f = f_g(cfg.loss, y, omega, ov.V, shift);
      df = df_g_domega(cfg.loss, y, omega, ov.V, shift);
    }
    out.m += dzw * f;
    out.q += zw * f * f;
    out.V -= zw * df;
    out.P += zw * y * f;
  };

  if (cfg.channel.kind == ChannelSpec::Kind::probit || cfg.channel.noise == 0.0) {
    const double ys[2] = {opt.reverse_labels ? -1.0 : 1.0, opt.reverse_labels ? 1.0 : -1.0};
    ChannelSpec ch = cfg.channel;
    if (ch.kind == ChannelSpec::Kind::noisy_sign) ch = ChannelSpec::probit(0.0);
    for (double y : ys) accumulate(y, z0(ch, y, omega0, var0), dz0_domega(ch, y, omega0, var0));
  } else {
    // Continuous labels y = sign(z) + sqrt(Delta) eta.
    const auto& inner = gauss_hermite_rule(opt.label_nodes);
    const double sd = std::sqrt(cfg.channel.noise);
    double up = var0 > 0 ? normal_cdf(omega0 / std::sqrt(var0)) : (omega0 > 0 ? 1.0 : 0.0);
    double dup = var0 > 0 ? normal_pdf(omega0 / std::sqrt(var0)) / std::sqrt(var0) : 0.0;
    const double signs[2] = {opt.reverse_labels ? -1.0 : 1.0, opt.reverse_labels ? 1.0 : -1.0};
    for (double s : signs) {
      double mass = s > 0 ? up : 1.0 - up;
      double dmass = s * dup;
      for (std::size_t k = 0; k < inner.nodes.size(); ++k)
        accumulate(s + sd * inner.nodes[k], inner.weights[k] * mass, inner.weights[k] * dmass);
    }
  }
  return out;
}

ConjugateOverlaps hat_update(const Overlaps& ov, const ProblemConfig& cfg,
                             const HatOptions& opt) {
  if (!(ov.q > 0 && ov.V > 0)) throw std::domain_error("hat_update: needs q > 0 and V > 0");
  GaussHermiteRule panels;
  if (opt.quadrature == Quadrature::panels) {
    PanelSpec spec;
    spec.nodes_per_panel = opt.panel_nodes;
    spec.breakpoints.push_back(0.0);
    const double rho = cfg.teacher_rho();
    double var0 = std::max(rho - ov.m * ov.m / ov.q, 0.0) + cfg.channel.tau_sq();
    if (ov.m != 0.0) {
      // Z0 switches over |xi| ~ sqrt(var0) sqrt(q) / |m| around 0.
      spec.refine_at.push_back(0.0);
      spec.refine_scale = std::max(std::sqrt(var0 * ov.q) / std::abs(ov.m), 1e-8);
    }
    if (cfg.loss == Loss::hinge) {
      // The hinge prox has kinks at y omega = 1 + s and y omega = 1 + s - V y^2,
      // for every label value the inner rule visits.
      double s = opt.decouple_dual_norm ? 0.0 : margin_shift(ov.P, cfg);
      double sq = std::sqrt(ov.q);
      std::vector<double> labels{1.0};
      if (cfg.channel.kind == ChannelSpec::Kind::noisy_sign && cfg.channel.noise > 0) {
        labels.clear();
        const double sd = std::sqrt(cfg.channel.noise);
        for (double x : gauss_hermite_rule(opt.label_nodes).nodes) labels.push_back(1.0 + sd * x);
      }
      for (double y : labels) {
        if (y == 0.0) continue;
        for (double b : {(1.0 + s) / (y * sq), (1.0 + s - ov.V * y * y) / (y * sq)}) {
          spec.breakpoints.push_back(b);
          spec.breakpoints.push_back(-b);
        }
      }
    }
    panels = piecewise_gaussian_rule(spec);
  }
  const auto& rule =
      opt.quadrature == Quadrature::panels ? panels : gauss_hermite_rule(opt.nodes);
  HatIntegrand acc;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    HatIntegrand v = hat_integrand(rule.nodes[i], ov, cfg, opt);
    double w = rule.weights[i];
    acc.m += w * v.m;
    acc.q += w * v.q;
    acc.V += w * v.V;
    acc.P += w * v.P;
  }
  ConjugateOverlaps h;
  h.mhat = cfg.alpha * acc.m;
  h.qhat = cfg.alpha * acc.q;
  h.Vhat = cfg.alpha * acc.V;
  h.Phat = opt.decouple_dual_norm ? 0.0 : cfg.alpha * phat_prefactor(ov.P, cfg) * acc.P;
  return h;
}

}  // namespace rerm

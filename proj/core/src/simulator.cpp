#include "rerm/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "rerm/metrics.hpp"
#include "rerm/parallel.hpp"
#include "rerm/scalar.hpp"

namespace rerm {

namespace {

using Vec = Eigen::VectorXd;

bool is_maha(const ProblemConfig& cfg) { return cfg.geometry == Geometry::mahalanobis; }

double loss_value(Loss loss, double a) {
  if (loss == Loss::hinge) return std::max(0.0, 1.0 - a);
  return a > 0 ? std::log1p(std::exp(-a)) : -a + std::log1p(std::exp(a));
}

// A (sub)derivative of the loss.
double loss_slope(Loss loss, double a) {
  if (loss == Loss::hinge) return a < 1.0 ? -1.0 : 0.0;
  if (a > 0) {
    double e = std::exp(-a);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(a));
}

// Subgradient of the dual norm; zero at w = 0.
Vec dual_norm_grad(const Dataset& ds, const ProblemConfig& cfg, const Vec& w, double norm) {
  Vec g = Vec::Zero(w.size());
  if (norm == 0.0) return g;
  if (is_maha(cfg)) return ds.sigma_zeta.cwiseProduct(w) / norm;
  const double ps = cfg.norms.pstar;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (w[j] == 0.0) continue;
    double s = w[j] > 0 ? 1.0 : -1.0;
    g[j] = ps == 1.0 ? s : s * std::pow(std::abs(w[j]) / norm, ps - 1.0);
  }
  return g;
}

double penalty(const Dataset& ds, const ProblemConfig& cfg, const Vec& w) {
  if (is_maha(cfg)) return 0.5 * cfg.lambda * ds.sigma_w.dot(w.cwiseAbs2());
  const double r = cfg.norms.r;
  if (r == 2.0) return cfg.lambda * w.squaredNorm();
  if (r == 1.0) return cfg.lambda * w.lpNorm<1>();
  double s = 0.0;
  for (double v : w) s += std::pow(std::abs(v), r);
  return cfg.lambda * s;
}

Vec penalty_subgrad(const Dataset& ds, const ProblemConfig& cfg, const Vec& w) {
  if (is_maha(cfg)) return cfg.lambda * ds.sigma_w.cwiseProduct(w);
  const double r = cfg.norms.r;
  Vec g(w.size());
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    double a = std::abs(w[j]);
    double s = w[j] > 0 ? 1.0 : (w[j] < 0 ? -1.0 : 0.0);
    g[j] = cfg.lambda * (r == 1.0 ? s : r * std::pow(a, r - 1.0) * s);
  }
  return g;
}

// Loss part evaluated from the cached product X w.
double loss_sum(const Dataset& ds, Loss loss, const Vec& Xw, double shift, Vec* slopes) {
  const double isd = 1.0 / std::sqrt(static_cast<double>(ds.d()));
  double total = 0.0;
  if (slopes) slopes->resize(Xw.size());
  for (Eigen::Index i = 0; i < Xw.size(); ++i) {
    double a = ds.y[i] * Xw[i] * isd - shift;
    total += loss_value(loss, a);
    if (slopes) (*slopes)[i] = loss_slope(loss, a);
  }
  return total;
}

RermResult solve_subgradient(const Dataset& ds, const ProblemConfig& cfg, double eps_f,
                             const RermSettings& s) {
  const int d = ds.d();
  const double isd = 1.0 / std::sqrt(static_cast<double>(d));
  const double kappa = eps_f * isd;
  Vec w = Vec::Zero(d), avg = Vec::Zero(d);
  RermResult best{w, rerm_objective(ds, cfg, eps_f, w), 0, true, false};
  double window_start = best.objective;
  Vec slopes;
  for (int t = 1; t <= s.subgradient_iters; ++t) {
    double norm = dual_norm(ds, cfg, w);
    Vec Xw = ds.X * w;
    loss_sum(ds, cfg.loss, Xw, kappa * norm, &slopes);
    Vec g = ds.X.transpose() * ds.y.cwiseProduct(slopes) * isd -
            kappa * slopes.sum() * dual_norm_grad(ds, cfg, w, norm) + penalty_subgrad(ds, cfg, w);
    w -= s.eta0 / std::sqrt(static_cast<double>(t)) * g;
    avg += (w - avg) / static_cast<double>(t);
    double fw = rerm_objective(ds, cfg, eps_f, w);
    if (fw < best.objective) best = {w, fw, t, true, false};
    if (t % s.window == 0) {
      double fa = rerm_objective(ds, cfg, eps_f, avg);
      if (fa < best.objective) best = {avg, fa, t, true, false};
      if (fw > window_start + 1e-6 * std::abs(window_start)) best.step_fault = true;
      window_start = fw;
    }
  }
  best.iterations = s.subgradient_iters;
  return best;
}

// Proximal gradient with momentum. For p* = 1 the dual norm is made linear by
// w = u - v with u, v >= 0; at the optimum min(u, v) = 0 componentwise because
// the loss strictly decreases when both shrink, so nothing is lost.
RermResult solve_accelerated(const Dataset& ds, const ProblemConfig& cfg, double eps_f,
                             const RermSettings& s) {
  if (cfg.loss != Loss::logistic)
    throw std::invalid_argument("accelerated optimizer needs a smooth loss");
  const int d = ds.d();
  const double isd = 1.0 / std::sqrt(static_cast<double>(d));
  const double kappa = eps_f * isd;
  const bool split = !is_maha(cfg) && cfg.norms.pstar == 1.0;
  const int dim = split ? 2 * d : d;
  const double r = cfg.norms.r;

  auto to_w = [&](const Vec& z) -> Vec { return split ? Vec(z.head(d) - z.tail(d)) : z; };
  // Smooth part value and gradient; Xw is X applied to to_w(z).
  auto smooth = [&](const Vec& z, const Vec& Xw, Vec* grad) {
    Vec w = to_w(z);
    Vec slopes;
    double norm = split ? z.sum() : dual_norm(ds, cfg, w);
    double v = loss_sum(ds, cfg.loss, Xw, kappa * norm, grad ? &slopes : nullptr);
    if (split) v += r == 1.0 ? cfg.lambda * z.sum() : penalty(ds, cfg, w);
    if (grad) {
      Vec c = ds.X.transpose() * ds.y.cwiseProduct(slopes) * isd;
      double sg = slopes.sum();
      if (split) {
        grad->resize(dim);
        Vec pen = r == 1.0 ? Vec::Constant(d, cfg.lambda) : penalty_subgrad(ds, cfg, w);
        grad->head(d) = c - Vec::Constant(d, kappa * sg) + pen;
        grad->tail(d) = -c - Vec::Constant(d, kappa * sg) + (r == 1.0 ? pen : Vec(-pen));
      } else {
        *grad = c - kappa * sg * dual_norm_grad(ds, cfg, w, norm);
      }
    }
    return v;
  };
  auto nonsmooth = [&](const Vec& z) { return split ? 0.0 : penalty(ds, cfg, z); };
  auto prox = [&](const Vec& z, double step) -> Vec {
    if (split) return z.cwiseMax(0.0);
    Vec out(d);
    if (is_maha(cfg)) {
      for (int j = 0; j < d; ++j) out[j] = z[j] / (1.0 + step * cfg.lambda * ds.sigma_w[j]);
      return out;
    }
    for (int j = 0; j < d; ++j) out[j] = power_prox(z[j] / step, 1.0 / step, cfg.lambda, r, 0.0, 2.0);
    return out;
  };

  Vec x = Vec::Zero(dim), Xx = Vec::Zero(ds.n());
  double fx = smooth(x, Xx, nullptr) + nonsmooth(x);
  Vec y = x, Xy = Xx;
  double t = 1.0, L = 1.0;
  int rejected = 0;
  RermResult res;
  Vec grad;
  for (int it = 1; it <= s.max_iters; ++it) {
    double sy = smooth(y, Xy, &grad);
    Vec xn, Xxn;
    double sxn;
    L = std::max(L / 1.5, 1e-12);
    for (;;) {
      xn = prox(y - grad / L, 1.0 / L);
      Xxn = ds.X * to_w(xn);
      sxn = smooth(xn, Xxn, nullptr);
      Vec dz = xn - y;
      if (sxn <= sy + grad.dot(dz) + 0.5 * L * dz.squaredNorm() + 1e-15 * std::abs(sy)) break;
      L *= 2.0;
      if (L > 1e300) throw std::runtime_error("solve_rerm: backtracking diverged");
    }
    double fxn = sxn + nonsmooth(xn);
    double step = (xn - x).norm();
    bool restart = fxn > fx || (y - xn).dot(xn - x) > 0;
    if (restart) {
      t = 1.0;
      if (fxn > fx) {
        // Reject the step and restart from x without momentum. Repeated
        // rejections from x itself mean rounding has taken over.
        res.iterations = it;
        if (++rejected >= 5) {
          res.converged = true;
          break;
        }
        y = x;
        Xy = Xx;
        continue;
      }
    }
    rejected = 0;
    double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    double beta = (t - 1.0) / tn;
    y = xn + beta * (xn - x);
    Xy = Xxn + beta * (Xxn - Xx);
    t = tn;
    x = std::move(xn);
    Xx = std::move(Xxn);
    fx = fxn;
    res.iterations = it;
    if (step <= s.tol * std::max(1.0, x.norm())) {
      res.converged = true;
      break;
    }
  }
  res.w = to_w(x);
  res.objective = rerm_objective(ds, cfg, eps_f, res.w);
  return res;
}

}  // namespace

double Dataset::teacher_norm() const {
  return w_star.dot(sigma_x.cwiseProduct(w_star)) / static_cast<double>(d());
}

Dataset generate_dataset(const ProblemConfig& cfg, int d, std::uint64_t seed) {
  if (d < 2) throw ConfigError("simulation dimension must be at least 2");
  const long n = std::lround(cfg.alpha * d);
  if (n < 1) throw ConfigError("alpha * d must round to at least one sample");
  if (cfg.channel.kind != ChannelSpec::Kind::probit)
    throw ConfigError("the simulator supports the probit channel only");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;

  Dataset ds;
  ds.seed = seed;
  ds.sigma_x = Vec::Ones(d);
  ds.sigma_zeta = Vec::Ones(d);
  ds.sigma_w = Vec::Ones(d);
  Vec teacher_sd = Vec::Ones(d);
  if (is_maha(cfg)) {
    ds.mode = CovarianceMode::spectral;
    const auto& atoms = cfg.measure.atoms;
    double total = 0.0, cum = 0.0;
    for (const auto& a : atoms) total += a.weight;
    int start = 0;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      cum += atoms[k].weight;
      int stop = k + 1 == atoms.size() ? d : static_cast<int>(std::lround(d * cum / total));
      for (int j = start; j < stop; ++j) {
        ds.sigma_x[j] = atoms[k].omega;
        ds.sigma_zeta[j] = atoms[k].zeta;
        ds.sigma_w[j] = atoms[k].w;
        // theta_bar^2 = omega^2 theta with theta the teacher variance.
        teacher_sd[j] = std::sqrt(atoms[k].theta_bar_sq) / atoms[k].omega;
      }
      start = stop;
    }
  }

  ds.w_star.resize(d);
  if (cfg.prior.kind == PriorSpec::Kind::gaussian) {
    const double sd = std::sqrt(cfg.prior.rho);
    for (int j = 0; j < d; ++j) ds.w_star[j] = (is_maha(cfg) ? teacher_sd[j] : sd) * normal(gen);
  } else {
    std::uniform_real_distribution<double> unif;
    for (int j = 0; j < d; ++j) {
      double u = unif(gen);
      ds.w_star[j] = u < cfg.prior.rho ? 0.0 : (u < 0.5 * (1.0 + cfg.prior.rho) ? 1.0 : -1.0);
    }
  }

  ds.X.resize(n, d);
  Vec sx = ds.sigma_x.cwiseSqrt();
  for (long i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) ds.X(i, j) = sx[j] * normal(gen);
  ds.y.resize(n);
  Vec z = ds.X * ds.w_star / std::sqrt(static_cast<double>(d));
  for (long i = 0; i < n; ++i) {
    double f = z[i] + cfg.channel.noise * normal(gen);
    ds.y[i] = f >= 0 ? 1.0 : -1.0;
  }
  return ds;
}

double finite_eps(const ProblemConfig& cfg, int d) {
  if (is_maha(cfg)) return cfg.eps;
  const double ps = cfg.norms.pstar;
  return cfg.eps * std::sqrt(static_cast<double>(d)) / std::pow(static_cast<double>(d), 1.0 / ps);
}

double dual_norm(const Dataset& ds, const ProblemConfig& cfg, const Eigen::VectorXd& w) {
  if (is_maha(cfg)) return std::sqrt(w.dot(ds.sigma_zeta.cwiseProduct(w)));
  return lp_norm(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())),
                 cfg.norms.pstar);
}

double rerm_objective(const Dataset& ds, const ProblemConfig& cfg, double eps_finite,
                      const Eigen::VectorXd& w) {
  const double kappa = eps_finite / std::sqrt(static_cast<double>(ds.d()));
  Vec Xw = ds.X * w;
  return loss_sum(ds, cfg.loss, Xw, kappa * dual_norm(ds, cfg, w), nullptr) + penalty(ds, cfg, w);
}

RermResult solve_rerm(const Dataset& ds, const ProblemConfig& cfg, double eps_finite,
                      const RermSettings& settings) {
  if (!(eps_finite >= 0)) throw ConfigError("finite eps must be nonnegative");
  Optimizer m = settings.method;
  if (m == Optimizer::automatic)
    m = cfg.loss == Loss::logistic ? Optimizer::accelerated : Optimizer::subgradient;
  return m == Optimizer::accelerated ? solve_accelerated(ds, cfg, eps_finite, settings)
                                     : solve_subgradient(ds, cfg, eps_finite, settings);
}

Overlaps empirical_overlaps(const Eigen::VectorXd& w_hat, const Dataset& ds,
                            const ProblemConfig& cfg) {
  const double d = ds.d();
  Overlaps ov;
  Vec sw = ds.sigma_x.cwiseProduct(w_hat);
  ov.m = ds.w_star.dot(sw) / d;
  ov.q = w_hat.dot(sw) / d;
  ov.V = std::nan("");
  if (is_maha(cfg)) {
    ov.P = w_hat.dot(ds.sigma_zeta.cwiseProduct(w_hat)) / d;
  } else {
    double s = 0.0;
    for (double v : w_hat) s += std::pow(std::abs(v), cfg.norms.pstar);
    ov.P = s / d;
  }
  return ov;
}

ErrorReport test_set_errors(const Eigen::VectorXd& w_hat, const Dataset& ds,
                            const ProblemConfig& cfg, double eps_finite, int n_test,
                            std::uint64_t seed) {
  if (n_test < 1) throw ConfigError("n_test must be positive");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  const int d = ds.d();
  const double isd = 1.0 / std::sqrt(static_cast<double>(d));
  const double margin = eps_finite * isd * dual_norm(ds, cfg, w_hat);
  Vec sx = ds.sigma_x.cwiseSqrt();
  long wrong = 0, flipped = 0;
  for (int i = 0; i < n_test; ++i) {
    double zt = 0.0, zs = 0.0;
    for (int j = 0; j < d; ++j) {
      double x = sx[j] * normal(gen);
      zt += ds.w_star[j] * x;
      zs += w_hat[j] * x;
    }
    double y = zt * isd + cfg.channel.noise * normal(gen) >= 0 ? 1.0 : -1.0;
    double a = y * zs * isd;
    if (a <= 0) ++wrong;
    else if (a <= margin) ++flipped;
  }
  ErrorReport r;
  r.e_gen = static_cast<double>(wrong) / n_test;
  r.e_bnd = static_cast<double>(flipped) / n_test;
  r.e_rob = r.e_gen + r.e_bnd;
  r.teacher_margin = teacher_margin(ds.teacher_norm(), cfg.channel.noise);
  return r;
}

Comparison compare_theory_simulation(const ProblemConfig& cfg, const ComparisonSettings& s) {
  if (s.seeds < 2) throw ConfigError("comparison needs at least two seeds");
  Comparison out;
  out.eps_finite = finite_eps(cfg, s.d);
  out.rows.resize(static_cast<std::size_t>(s.seeds));
  parallel_for(
      out.rows.size(),
      [&](std::size_t k) {
        SeedRow& row = out.rows[k];
        row.seed = s.base_seed + k;
        Dataset ds = generate_dataset(cfg, s.d, row.seed);
        RermResult fit = solve_rerm(ds, cfg, out.eps_finite, s.rerm);
        row.objective = fit.objective;
        row.optimizer_converged = fit.converged;
        row.overlaps = empirical_overlaps(fit.w, ds, cfg);
        row.report = s.use_test_set
                         ? test_set_errors(fit.w, ds, cfg, out.eps_finite, s.n_test,
                                           row.seed + 0x9e3779b97f4a7c15ULL)
                         : error_report(row.overlaps, cfg, ds.teacher_norm());
      },
      s.threads);

  auto stats = [&](auto get, double& mean, double& se) {
    double sum = 0.0;
    for (const auto& r : out.rows) sum += get(r.report);
    mean = sum / s.seeds;
    double ss = 0.0;
    for (const auto& r : out.rows) ss += (get(r.report) - mean) * (get(r.report) - mean);
    se = std::sqrt(ss / (s.seeds - 1) / s.seeds);
  };
  stats([](const ErrorReport& r) { return r.e_gen; }, out.mean.e_gen, out.std_error.e_gen);
  stats([](const ErrorReport& r) { return r.e_bnd; }, out.mean.e_bnd, out.std_error.e_bnd);
  stats([](const ErrorReport& r) { return r.e_rob; }, out.mean.e_rob, out.std_error.e_rob);

  SolveResult th = solve_fixed_point(cfg, s.solver);
  out.theory_converged = th.converged;
  out.theory_overlaps = th.overlaps;
  if (th.converged) {
    out.theory = error_report(th.overlaps, cfg);
    auto inside = [](double theory, double mean, double se) {
      return std::abs(theory - mean) <= 3.0 * se + 1e-12;
    };
    out.agree_gen = inside(out.theory.e_gen, out.mean.e_gen, out.std_error.e_gen);
    out.agree_bnd = inside(out.theory.e_bnd, out.mean.e_bnd, out.std_error.e_bnd);
    out.agree_rob = inside(out.theory.e_rob, out.mean.e_rob, out.std_error.e_rob);
  }
  return out;
}

}  // namespace rerm

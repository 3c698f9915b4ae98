#include "rerm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rerm/channel.hpp"
#include "rerm/metrics.hpp"
#include "rerm/parallel.hpp"
#include "rerm/prior_lp.hpp"
#include "rerm/prior_mahalanobis.hpp"

namespace rerm {

void SolverSettings::validate() const {
  if (!(mu > 0 && mu <= 1)) throw ConfigError("solver damping must lie in (0, 1]");
  if (!(tol > 0)) throw ConfigError("solver tolerance must be positive");
  if (max_iters < 1) throw ConfigError("solver max_iters must be positive");
  if (!(mu_min > 0 && mu_min <= mu)) throw ConfigError("solver mu_min must lie in (0, mu]");
  if (stall_window < 1) throw ConfigError("solver stall_window must be positive");
  if (nodes < 1 || panel_nodes < 1) throw ConfigError("quadrature nodes must be positive");
}

ConjugateOverlaps hat_step(const Overlaps& ov, const ProblemConfig& cfg,
                           const SolverSettings& s) {
  HatOptions opt;
  opt.quadrature = s.quadrature;
  opt.nodes = s.nodes;
  opt.panel_nodes = s.panel_nodes;
  opt.decouple_dual_norm = s.decouple_dual_norm;
  return hat_update(ov, cfg, opt);
}

Overlaps nonhat_step(const ConjugateOverlaps& hats, const ProblemConfig& cfg,
                     const SolverSettings& s) {
  if (cfg.geometry == Geometry::mahalanobis) {
    if (!(hats.Vhat > 0)) throw std::domain_error("Vhat must be positive");
    return nonhat_update_maha(hats, cfg.lambda, cfg.measure);
  }
  NonhatOptions opt;
  opt.quadrature = s.quadrature;
  opt.nodes = s.nodes;
  opt.panel_nodes = s.panel_nodes;
  return nonhat_update_lp(hats, cfg, opt);
}

namespace {

double max_abs_diff(const Overlaps& a, const Overlaps& b) {
  return std::max({std::abs(a.m - b.m), std::abs(a.q - b.q), std::abs(a.V - b.V),
                   std::abs(a.P - b.P)});
}

double max_abs_diff(const ConjugateOverlaps& a, const ConjugateOverlaps& b) {
  return std::max({std::abs(a.mhat - b.mhat), std::abs(a.qhat - b.qhat),
                   std::abs(a.Vhat - b.Vhat), std::abs(a.Phat - b.Phat)});
}

Overlaps damp(const Overlaps& n, const Overlaps& o, double mu) {
  return {mu * n.m + (1 - mu) * o.m, mu * n.q + (1 - mu) * o.q, mu * n.V + (1 - mu) * o.V,
          mu * n.P + (1 - mu) * o.P};
}

ConjugateOverlaps damp(const ConjugateOverlaps& n, const ConjugateOverlaps& o, double mu) {
  return {mu * n.mhat + (1 - mu) * o.mhat, mu * n.qhat + (1 - mu) * o.qhat,
          mu * n.Vhat + (1 - mu) * o.Vhat, mu * n.Phat + (1 - mu) * o.Phat};
}

void check_hats(const ConjugateOverlaps& h) {
  if (!(h.qhat >= 0)) throw std::domain_error("qhat must be nonnegative");
  if (!(h.Vhat > 0)) throw std::domain_error("Vhat must be positive");
  if (!(h.Phat >= 0)) throw std::domain_error("Phat must be nonnegative");
}

SolveResult iterate(const ProblemConfig& cfg, const SolverSettings& s, Overlaps ov,
                    ConjugateOverlaps hats) {
  SolveResult res;
  res.overlaps = ov;
  res.hats = hats;
  const double rho = cfg.teacher_rho();
  double mu = s.mu;
  double best = kInf;
  int since_best = 0;
  try {
    check_hats(hats);
    for (int it = 1; it <= s.max_iters; ++it) {
      Overlaps next = damp(nonhat_step(hats, cfg, s), ov, mu);
      double delta = max_abs_diff(next, ov);
      ov = next;
      check_overlaps(ov, rho);
      ConjugateOverlaps hnext = damp(hat_step(ov, cfg, s), hats, mu);
      double hdelta = max_abs_diff(hnext, hats);
      hats = hnext;
      check_hats(hats);
      res.overlaps = ov;
      res.hats = hats;
      res.iterations = it;
      res.residual = delta;
      res.final_mu = mu;
      if (!std::isfinite(delta)) break;
      if (delta <= s.tol && hdelta <= s.tol) {
        res.converged = true;
        break;
      }
      // Cycles of the damped map are broken by halving mu.
      if (delta < 0.9 * best) {
        best = delta;
        since_best = 0;
      } else if (++since_best >= s.stall_window && mu > s.mu_min) {
        mu = std::max(0.5 * mu, s.mu_min);
        best = delta;
        since_best = 0;
      }
    }
    if (res.converged) {
      ConjugateOverlaps h2 = hat_step(ov, cfg, s);
      res.hat_residual = max_abs_diff(h2, hats);
      res.map_residual = max_abs_diff(nonhat_step(hats, cfg, s), ov);
    }
  } catch (const std::domain_error&) {
    res.converged = false;
  }
  return res;
}

}  // namespace

SolveResult solve_fixed_point(const ProblemConfig& cfg, const SolverSettings& s) {
  s.validate();
  ConjugateOverlaps hats;
  try {
    hats = hat_step(s.init, cfg, s);
  } catch (const std::domain_error&) {
    SolveResult res;
    res.overlaps = s.init;
    return res;
  }
  return iterate(cfg, s, s.init, hats);
}

SolveResult solve_fixed_point(const ProblemConfig& cfg, const SolverSettings& s,
                              const SolveResult& warm) {
  s.validate();
  // Hats of the previous problem would map straight back to its overlaps.
  ConjugateOverlaps hats;
  try {
    hats = hat_step(warm.overlaps, cfg, s);
  } catch (const std::domain_error&) {
    return solve_fixed_point(cfg, s);
  }
  return iterate(cfg, s, warm.overlaps, hats);
}

GoldenResult golden_section_log(const std::function<double(double)>& f, double lo, double hi,
                                double rel_width) {
  if (!(lo > 0 && hi > lo)) throw std::invalid_argument("golden_section_log needs 0 < lo < hi");
  const double g = 0.6180339887498949;
  double a = std::log(lo), b = std::log(hi);
  const double stop = std::log1p(rel_width);
  GoldenResult best{std::exp(a), kInf, 0};
  auto eval = [&](double x) {
    double v = f(std::exp(x));
    ++best.evaluations;
    if (std::isnan(v)) v = kInf;
    if (v < best.fx) {
      best.fx = v;
      best.x = std::exp(x);
    }
    return v;
  };
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = eval(c), fd = eval(d);
  if (std::isinf(fc) && std::isinf(fd)) {
    // No ordering information; bracket the best finite point of a coarse scan.
    const int n = 24;
    const double h = (b - a) / n;
    int k_best = -1;
    double f_best = kInf;
    for (int k = 0; k <= n; ++k) {
      double v = eval(a + k * h);
      if (v < f_best) f_best = v, k_best = k;
    }
    if (k_best < 0) return best;
    const double a0 = a;
    a = a0 + std::max(0, k_best - 1) * h;
    b = a0 + std::min(n, k_best + 1) * h;
    c = b - g * (b - a);
    d = a + g * (b - a);
    fc = eval(c);
    fd = eval(d);
  }
  while (b - a > stop) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = eval(d);
    }
  }
  return best;
}

TuneResult tune_lambda(const ProblemConfig& cfg, const SolverSettings& settings,
                       const TuneSettings& ts, const SolveResult* warm) {
  TuneResult out;
  out.objective = kInf;
  std::optional<SolveResult> chain;
  if (warm && warm->converged) chain = *warm;
  auto objective = [&](double lambda) {
    ProblemConfig c = cfg;
    c.lambda = lambda;
    SolveResult r = chain ? solve_fixed_point(c, settings, *chain) : solve_fixed_point(c, settings);
    if (!r.converged && chain) r = solve_fixed_point(c, settings);
    if (!r.converged) return kInf;
    chain = r;
    ErrorReport rep;
    try {
      rep = error_report(r.overlaps, c);
    } catch (const std::domain_error&) {
      return kInf;
    }
    double v = ts.objective == Objective::e_rob ? rep.e_rob : rep.e_gen;
    if (v < out.objective) {
      out.objective = v;
      out.lambda_star = lambda;
      out.report = rep;
      out.solve = r;
      out.ok = true;
    }
    return v;
  };
  GoldenResult g = golden_section_log(objective, ts.lo, ts.hi, ts.rel_width);
  out.evaluations = g.evaluations;
  return out;
}

RSweepResult sweep_regularization_order(const ProblemConfig& cfg_base,
                                        const std::vector<double>& r_grid, bool tune,
                                        const SolverSettings& settings,
                                        const TuneSettings& ts) {
  if (!std::is_sorted(r_grid.begin(), r_grid.end()))
    throw std::invalid_argument("r grid must be sorted ascending");
  RSweepResult out;
  std::optional<SolveResult> chain;
  double best = kInf;
  for (double r : r_grid) {
    ProblemConfig cfg = cfg_base;
    cfg.norms.r = r;
    cfg = validate_config(cfg);
    SweepPoint pt;
    pt.r = r;
    if (tune) {
      TuneResult t = tune_lambda(cfg, settings, ts, chain ? &*chain : nullptr);
      pt.ok = t.ok;
      pt.lambda_star = t.lambda_star;
      pt.report = t.report;
      pt.solve = t.solve;
    } else {
      SolveResult s = chain ? solve_fixed_point(cfg, settings, *chain) : solve_fixed_point(cfg, settings);
      if (!s.converged && chain) s = solve_fixed_point(cfg, settings);
      pt.lambda_star = cfg.lambda;
      pt.solve = s;
      if (s.converged) {
        try {
          pt.report = error_report(s.overlaps, cfg);
          pt.ok = true;
        } catch (const std::domain_error&) {
        }
      }
    }
    if (pt.ok) {
      chain = pt.solve;
      if (pt.report.e_rob < best) {
        best = pt.report.e_rob;
        out.r_star = r;
      }
    } else {
      ++out.failed;
    }
    out.points.push_back(pt);
  }
  return out;
}

PhaseDiagram phase_diagram(const std::vector<double>& alpha_grid,
                           const std::vector<double>& eps_grid, const ProblemConfig& cfg_base,
                           double rA, double rB, const SolverSettings& settings,
                           const TuneSettings& ts, unsigned threads) {
  if (alpha_grid.empty() || eps_grid.empty())
    throw std::invalid_argument("phase diagram grids must be nonempty");
  PhaseDiagram pd;
  pd.alphas = alpha_grid;
  pd.eps = eps_grid;
  pd.delta.assign(alpha_grid.size(), std::vector<double>(eps_grid.size(), std::nan("")));
  parallel_for(
      alpha_grid.size(),
      [&](std::size_t i) {
        std::optional<SolveResult> chainA, chainB;
        for (std::size_t j = 0; j < eps_grid.size(); ++j) {
          ProblemConfig c = cfg_base;
          c.alpha = alpha_grid[i];
          c.eps = eps_grid[j];
          c.norms.r = rA;
          c = validate_config(c);
          TuneResult a = tune_lambda(c, settings, ts, chainA ? &*chainA : nullptr);
          c.norms.r = rB;
          TuneResult b = tune_lambda(c, settings, ts, chainB ? &*chainB : nullptr);
          if (a.ok) chainA = a.solve;
          if (b.ok) chainB = b.solve;
          if (a.ok && b.ok) pd.delta[i][j] = a.report.e_rob - b.report.e_rob;
        }
      },
      threads);
  for (const auto& row : pd.delta)
    for (double v : row)
      if (std::isnan(v)) ++pd.failed;
  return pd;
}

std::vector<AlphaSweepRow> alpha_sweep(const ProblemConfig& cfg_base,
                                       const std::vector<double>& alphas,
                                       const std::vector<double>& r_values, bool tune,
                                       const SolverSettings& settings, const TuneSettings& ts,
                                       unsigned threads) {
  std::vector<AlphaSweepRow> rows(alphas.size() * r_values.size());
  parallel_for(
      r_values.size(),
      [&](std::size_t k) {
        std::optional<SolveResult> chain;
        for (std::size_t i = 0; i < alphas.size(); ++i) {
          ProblemConfig c = cfg_base;
          c.alpha = alphas[i];
          c.norms.r = r_values[k];
          c = validate_config(c);
          AlphaSweepRow& row = rows[k * alphas.size() + i];
          row.alpha = alphas[i];
          row.r = r_values[k];
          if (tune) {
            TuneResult t = tune_lambda(c, settings, ts, chain ? &*chain : nullptr);
            row.ok = t.ok;
            row.lambda_star = t.lambda_star;
            row.report = t.report;
            if (t.ok) chain = t.solve;
          } else {
            SolveResult s =
                chain ? solve_fixed_point(c, settings, *chain) : solve_fixed_point(c, settings);
            if (!s.converged && chain) s = solve_fixed_point(c, settings);
            row.lambda_star = c.lambda;
            if (s.converged) {
              row.report = error_report(s.overlaps, c);
              row.ok = true;
              chain = s;
            }
          }
        }
      },
      threads);
  return rows;
}

}  // namespace rerm

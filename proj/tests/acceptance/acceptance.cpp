// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "rerm/channel.hpp"
#include "rerm/metrics.hpp"
#include "rerm/parallel.hpp"
#include "rerm/prior_lp.hpp"
#include "rerm/prior_mahalanobis.hpp"
#include "rerm/scalar.hpp"
#include "rerm/scaling.hpp"
#include "rerm/simulator.hpp"
#include "rerm/solver.hpp"

using namespace rerm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failures with a short reason; the first few are reported.
struct Check {
  int failures = 0;
  std::ostringstream first;
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures < 3) first << (failures ? "; " : "") << what;
    ++failures;
  }
  Outcome outcome(const std::string& summary) const {
    if (failures == 0) return {true, summary};
    return {false, std::to_string(failures) + " failed: " + first.str()};
  }
};

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ProblemConfig linf(double alpha, double eps, double r, double lambda) {
  ProblemConfig c;
  c.alpha = alpha;
  c.eps = eps;
  c.lambda = lambda;
  c.norms = NormOrder::make(kInf, r);
  return validate_config(c);
}

// ---------------------------------------------------------------- 1
// Identity and reduction suite. `csv` receives every checked value.
Outcome identities(std::string& csv) {
  Check ck;
  std::mt19937_64 gen(20240101);
  std::uniform_real_distribution<double> U;
  csv = "kind,index,a,b,c\n";
  for (int t = 0; t < 1000; ++t) {
    ProblemConfig c = oracle::random_lp_config(gen);
    Overlaps o = oracle::random_overlaps(gen, c.teacher_rho());
    ErrorReport r = error_report(o, c);
    ck.expect(r.e_rob == r.e_gen + r.e_bnd, "e_rob != e_gen + e_bnd");
    csv += "report," + std::to_string(t) + "," + g17(r.e_gen) + "," + g17(r.e_bnd) + "," +
           g17(r.e_rob) + "\n";
  }
  for (int t = 0; t < 200; ++t) {
    ProblemConfig c = oracle::random_lp_config(gen);
    c.eps = 0;
    Overlaps o = oracle::random_overlaps(gen, c.teacher_rho());
    ConjugateOverlaps h = hat_update(o, c);
    ck.expect(h.Phat == 0.0, "Phat != 0 at eps = 0");
    ck.expect(error_report(o, c).e_bnd == 0.0, "e_bnd != 0 at eps = 0");
    csv += "hat_eps0," + std::to_string(t) + "," + g17(h.mhat) + "," + g17(h.Vhat) + "," +
           g17(h.Phat) + "\n";
  }
  for (int t = 0; t < 6; ++t) {
    ProblemConfig c = linf(0.3 + 2 * U(gen), 0.0, 1 + 2 * U(gen), 0.02 + U(gen));
    SolveResult s = solve_fixed_point(c);
    ck.expect(s.converged, "eps = 0 solve did not converge");
    ck.expect(s.hats.Phat == 0.0, "converged Phat != 0 at eps = 0");
    ck.expect(error_report(s.overlaps, c).e_bnd == 0.0, "converged e_bnd != 0 at eps = 0");
    csv += "solve_eps0," + std::to_string(t) + "," + g17(s.overlaps.m) + "," + g17(s.overlaps.q) +
           "," + g17(s.hats.Phat) + "\n";
  }
  double worst = 0;
  for (int t = 0; t < 8; ++t) {
    ProblemConfig lp;
    lp.alpha = 0.2 + 3 * U(gen);
    lp.eps = t % 4 == 0 ? 0.0 : 0.6 * U(gen);
    lp.lambda = 0.01 + U(gen);
    lp.norms = NormOrder::make(2, 2);
    lp.channel = ChannelSpec::probit(t % 2 ? 0.3 * U(gen) : 0.0);
    lp = validate_config(lp);
    ProblemConfig mh = lp;
    mh.geometry = Geometry::mahalanobis;
    mh.measure.atoms = {SpectralAtom{1, 1, 1, 1, 1}};
    mh.lambda = 2 * lp.lambda;  // (lambda/2) w' Sigma_w w on this side
    mh = validate_config(mh);
    SolverSettings s;
    s.tol = 1e-9;
    SolveResult a = solve_fixed_point(lp, s), b = solve_fixed_point(mh, s);
    ck.expect(a.converged && b.converged, "reduction solve did not converge");
    double d = std::max({std::abs(a.overlaps.m - b.overlaps.m), std::abs(a.overlaps.q - b.overlaps.q),
                         std::abs(a.overlaps.V - b.overlaps.V), std::abs(a.overlaps.P - b.overlaps.P)});
    worst = std::max(worst, d);
    ck.expect(d <= 1e-6, "Mahalanobis vs lp differ by " + g17(d));
    csv += "reduction," + std::to_string(t) + "," + g17(a.overlaps.m) + "," + g17(b.overlaps.m) +
           "," + g17(d) + "\n";
  }
  return ck.outcome("1200 identities, 8 reductions, max overlap gap " + fmt("%.2e", worst));
}

// ---------------------------------------------------------------- 2
ScalarFunction random_function(std::mt19937_64& gen, bool smooth) {
  std::uniform_real_distribution<double> U;
  double y = U(gen) < 0.5 ? 1.0 : -1.0, s = 2 * U(gen);
  const double e[] = {1.5, 2.0, 3.0};
  switch (gen() % (smooth ? 3 : 5)) {
    case 0: return ScalarFunction::logistic_loss(y, s);
    case 1: return ScalarFunction::quadratic(0.1 + 3 * U(gen));
    case 2: return ScalarFunction::power_penalty(0.1 + U(gen), e[gen() % 3], U(gen), e[gen() % 3]);
    case 3: return ScalarFunction::hinge_loss(y, s);
    default: return ScalarFunction::power_penalty(0.1 + U(gen), 1.0, U(gen), 1.0 + gen() % 2);
  }
}

Outcome scalar_suite(std::string& csv) {
  Check ck;
  std::mt19937_64 gen(20240202);
  std::uniform_real_distribution<double> U;
  csv = "kind,index,a,b\n";
  for (int t = 0; t < 1000; ++t) {
    auto f = random_function(gen, false);
    double V = 0.1 + 3 * U(gen), a = 8 * U(gen) - 4, b = 8 * U(gen) - 4;
    double pa = prox(f, V, a), pb = prox(f, V, b);
    ck.expect(std::abs(pa - pb) <= std::abs(a - b) + 1e-12, "prox expands a pair");
    csv += "nonexpansive," + std::to_string(t) + "," + g17(pa) + "," + g17(pb) + "\n";
  }
  double worst_fd = 0;
  for (int t = 0; t < 100; ++t) {
    auto f = random_function(gen, true);
    double V = 0.1 + 3 * U(gen), w = 6 * U(gen) - 3, h = 1e-5;
    double g = moreau_grad(f, V, w);
    double fd = (moreau(f, V, w + h) - moreau(f, V, w - h)) / (2 * h);
    double rel = std::abs(g - fd) / std::max(std::abs(g), 1e-3);
    worst_fd = std::max(worst_fd, rel);
    ck.expect(rel <= 1e-5, "Moreau gradient off by " + g17(rel));
    csv += "moreau_grad," + std::to_string(t) + "," + g17(g) + "," + g17(fd) + "\n";
  }
  double worst_shift = 0;
  for (int t = 0; t < 300; ++t) {
    auto f = random_function(gen, false);
    double V = 0.1 + 3 * U(gen), w = 6 * U(gen) - 3, u = 4 * U(gen) - 2;
    double lhs = prox(f.shifted(u), V, w), rhs = -u + prox(f, V, w + u);
    worst_shift = std::max(worst_shift, std::abs(lhs - rhs));
    ck.expect(std::abs(lhs - rhs) <= 1e-9, "shift property off by " + g17(lhs - rhs));
    csv += "shift," + std::to_string(t) + "," + g17(lhs) + "," + g17(rhs) + "\n";
  }
  for (int t = 0; t < 100; ++t) {
    // explicit shift inside a custom evaluator: a genuinely different minimisation
    double a = 0.5 + U(gen), u = 4 * U(gen) - 2, V = 0.2 + U(gen), w = 4 * U(gen) - 2;
    auto f = [a](double x) { return std::log(std::cosh(a * x)) + std::exp(0.3 * x); };
    double lhs = prox(ScalarFunction::custom([=](double x) { return f(x + u); }), V, w);
    double rhs = -u + prox(ScalarFunction::custom(f), V, w + u);
    worst_shift = std::max(worst_shift, std::abs(lhs - rhs));
    ck.expect(std::abs(lhs - rhs) <= 1e-9, "custom shift property off by " + g17(lhs - rhs));
    csv += "shift_custom," + std::to_string(t) + "," + g17(lhs) + "," + g17(rhs) + "\n";
  }
  double worst_grid = 0;
  for (int t = 0; t < 200; ++t) {
    auto f = random_function(gen, false);
    double V = 0.1 + 3 * U(gen), w = 6 * U(gen) - 3;
    double x = prox(f, V, w);
    double g = oracle::grid_prox([&](double z) { return f(z); }, V, w, 20.0, 400001);
    worst_grid = std::max(worst_grid, std::abs(x - g));
    ck.expect(std::abs(x - g) <= 1e-3, "grid oracle off by " + g17(x - g));
    csv += "grid," + std::to_string(t) + "," + g17(x) + "," + g17(g) + "\n";
  }
  return ck.outcome("max rel FD gap " + fmt("%.1e", worst_fd) + ", shift " +
                    fmt("%.1e", worst_shift) + ", grid " + fmt("%.1e", worst_grid));
}

// ---------------------------------------------------------------- 3
Outcome quadrature_vs_monte_carlo() {
  Check ck;
  std::mt19937_64 gen(20240303);
  const long samples = 10000000;
  double zmax = 0;
  auto cover = [&](const oracle::McEstimate& e, double v, const std::string& what) {
    double z = e.z(v);
    zmax = std::max(zmax, z);
    ck.expect(z <= 3.0, what + " z=" + fmt("%.2f", z));
  };
  SwfmTable tab;
  const SwfmCase cases[] = {SwfmCase::w_equals_delta, SwfmCase::l2, SwfmCase::w_equals_delta_inverse,
                            SwfmCase::l2};
  for (int s = 0; s < 20; ++s) {
    const bool maha = s % 5 == 4;
    ProblemConfig c = oracle::random_lp_config(gen);
    c.channel = ChannelSpec::probit(s % 2 ? 0.5 * std::uniform_real_distribution<double>()(gen) : 0.0);
    if (maha) {
      c.geometry = Geometry::mahalanobis;
      c.norms = NormOrder::make(2, 2);
      c.prior = PriorSpec::gaussian(1.0);
      c.measure = swfm_case_measure(tab, cases[s / 5]);
      if (c.eps == 0) c.eps = 0.2;
    }
    c = validate_config(c);
    const std::string tag = "state " + std::to_string(s) + " ";
    Overlaps o = oracle::random_overlaps(gen, c.teacher_rho());
    ConjugateOverlaps h = hat_update(o, c);
    oracle::McHat mh = oracle::mc_hat(o, c, samples, 100 + s);
    cover(mh.mhat, h.mhat, tag + "mhat");
    cover(mh.qhat, h.qhat, tag + "qhat");
    cover(mh.Vhat, h.Vhat, tag + "Vhat");
    cover(mh.Phat, h.Phat, tag + "Phat");

    ConjugateOverlaps hs = oracle::random_hats(gen, c.eps > 0);
    Overlaps ov;
    oracle::McOverlaps mo;
    if (maha) {
      ov = nonhat_update_maha(hs, c.lambda, c.measure);
      mo = oracle::mc_nonhat_maha(hs, c.lambda, c.measure, samples, 200 + s);
    } else {
      ov = nonhat_update_lp(hs, c);
      mo = oracle::mc_nonhat_lp(hs, c, samples, 200 + s);
    }
    cover(mo.m, ov.m, tag + "m");
    cover(mo.q, ov.q, tag + "q");
    cover(mo.V, ov.V, tag + "V");
    cover(mo.P, ov.P, tag + "P");
  }
  return ck.outcome("20 states x 8 outputs, 1e7 samples each, max |z| " + fmt("%.2f", zmax));
}

// ---------------------------------------------------------------- 4
Outcome theory_vs_simulation() {
  Check ck;
  std::ostringstream info;
  double zmax = 0;
  for (double r : {1.0, 2.0}) {
    for (double alpha : {0.5, 1.0, 2.0}) {
      ProblemConfig c = linf(alpha, 0.2, r, 1.0);
      TuneResult t = tune_lambda(c);
      ck.expect(t.ok, "tuning failed");
      c.lambda = t.lambda_star;
      ComparisonSettings s;
      s.d = 1000;
      s.seeds = 10;
      Comparison cmp = compare_theory_simulation(c, s);
      const std::string tag = "r=" + fmt("%g", r) + " alpha=" + fmt("%g", alpha) + " ";
      ck.expect(cmp.theory_converged, tag + "theory did not converge");
      auto z = [&](double th, double mean, double se) {
        double v = std::abs(th - mean) / se;
        zmax = std::max(zmax, v);
        return v;
      };
      ck.expect(cmp.agree_gen, tag + "e_gen z=" + fmt("%.2f", z(cmp.theory.e_gen, cmp.mean.e_gen, cmp.std_error.e_gen)));
      ck.expect(cmp.agree_bnd, tag + "e_bnd z=" + fmt("%.2f", z(cmp.theory.e_bnd, cmp.mean.e_bnd, cmp.std_error.e_bnd)));
      ck.expect(cmp.agree_rob, tag + "e_rob z=" + fmt("%.2f", z(cmp.theory.e_rob, cmp.mean.e_rob, cmp.std_error.e_rob)));
      z(cmp.theory.e_gen, cmp.mean.e_gen, cmp.std_error.e_gen);
      z(cmp.theory.e_bnd, cmp.mean.e_bnd, cmp.std_error.e_bnd);
      z(cmp.theory.e_rob, cmp.mean.e_rob, cmp.std_error.e_rob);
    }
  }
  return ck.outcome("6 cells, d=1000, 10 seeds, max |theory - mean| / SE " + fmt("%.2f", zmax));
}

// ---------------------------------------------------------------- 5
Outcome order_transition() {
  Check ck;
  std::vector<double> grid(50);
  for (int i = 0; i < 50; ++i) grid[i] = 1.0 + 2.0 * i / 49;
  const std::vector<double> eps{0.0, 0.05, 0.1, 0.2, 0.4, 0.8};
  std::vector<double> rstar(eps.size(), std::nan(""));
  parallel_for(eps.size(), [&](std::size_t k) {
    RSweepResult res = sweep_regularization_order(linf(1.0, eps[k], 2.0, 1.0), grid, true);
    if (res.r_star) rstar[k] = *res.r_star;
  });
  std::string list;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    ck.expect(std::isfinite(rstar[k]), "no r_star at eps=" + fmt("%g", eps[k]));
    list += (k ? ", " : "") + fmt("%.4f", rstar[k]);
    if (k) ck.expect(rstar[k] <= rstar[k - 1], "r_star increases at eps=" + fmt("%g", eps[k]));
  }
  ck.expect(rstar[0] >= 1.9 && rstar[0] <= 2.1, "r_star(0) = " + fmt("%.4f", rstar[0]));
  ck.expect(rstar.back() <= 1.2, "r_star(0.8) = " + fmt("%.4f", rstar.back()));
  return ck.outcome("r_star = [" + list + "]");
}

// ---------------------------------------------------------------- 6
Outcome phase_signs() {
  Check ck;
  const std::vector<double> alphas{0.1, 0.25, 0.5, 1.0, 2.0, 4.0};
  const std::vector<double> eps{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  PhaseDiagram pd = phase_diagram(alphas, eps, linf(1.0, 0.0, 2.0, 1.0), 2.0, 1.0);
  ck.expect(pd.failed == 0, std::to_string(pd.failed) + " cells failed");
  double corner = pd.delta.front().back();
  ck.expect(corner > 0, "corner delta " + g17(corner));
  double edge_max = -kInf;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    edge_max = std::max(edge_max, pd.delta[i][0]);
    ck.expect(pd.delta[i][0] <= 0, "eps=0 delta at alpha=" + fmt("%g", alphas[i]) + " is " +
                                       g17(pd.delta[i][0]));
  }
  return ck.outcome("corner (alpha=0.1, eps=0.5) " + fmt("%+.4f", corner) + ", eps=0 edge max " +
                    fmt("%+.2e", edge_max));
}

// ---------------------------------------------------------------- 7
Outcome swfm_dominance() {
  Check ck;
  SwfmTable tab;
  const SwfmCase cases[] = {SwfmCase::w_equals_delta, SwfmCase::l2, SwfmCase::w_equals_delta_inverse};
  std::ostringstream info;
  for (double eps : {0.2, 0.4}) {
    double theory[3], sim[3];
    for (int k = 0; k < 3; ++k) {
      ProblemConfig c;
      c.alpha = 0.25;
      c.eps = eps;
      c.geometry = Geometry::mahalanobis;
      c.measure = swfm_case_measure(tab, cases[k]);
      c = validate_config(c);
      TuneResult t = tune_lambda(c);
      ck.expect(t.ok, "tuning failed");
      theory[k] = t.objective;
      c.lambda = t.lambda_star;
      ComparisonSettings s;
      s.d = 1000;
      s.seeds = 10;
      sim[k] = compare_theory_simulation(c, s).mean.e_rob;
    }
    ck.expect(theory[2] < theory[0] && theory[2] < theory[1],
              "theory order at eps=" + fmt("%g", eps));
    ck.expect(sim[2] < sim[0] && sim[2] < sim[1], "simulated order at eps=" + fmt("%g", eps));
    info << (eps == 0.2 ? "" : "; ") << "eps=" << eps << " theory " << fmt("%.4f", theory[0]) << "/"
         << fmt("%.4f", theory[1]) << "/" << fmt("%.4f", theory[2]) << " sim "
         << fmt("%.4f", sim[0]) << "/" << fmt("%.4f", sim[1]) << "/" << fmt("%.4f", sim[2]);
  }
  return ck.outcome(info.str() + " (delta / l2 / delta_inv)");
}

// ---------------------------------------------------------------- 8
Outcome low_alpha_scaling() {
  Check ck;
  ScalingSettings s;
  s.solver.max_iters = 20000;
  auto grid = geometric_grid(1e-4, 1e-2, 9);
  double gap[2] = {0, 0};
  for (int k = 0; k < 2; ++k) {
    const double r = k == 0 ? 1.0 : 2.0;
    ProblemConfig c = linf(1.0, 0.3, r, 1e-3);
    ScalingFit f = fit_scaling_exponents(c, grid, s);
    ck.expect(f.complete, "r=" + fmt("%g", r) + " grid incomplete");
    if (!f.complete) continue;
    gap[k] = f.P.slope / c.norms.pstar - f.q.slope / 2;
    if (r == 1.0) {
      ck.expect(gap[k] >= 0.05, "r=1 exponent gap " + g17(gap[k]));
      double lo = f.points.front().report.e_bnd, hi = f.points.back().report.e_bnd;
      ck.expect(lo < hi / 5, "r=1 e_bnd(1e-4)=" + g17(lo) + " vs e_bnd(1e-2)=" + g17(hi));
      ck.expect(leading_order_errors(f, c).regime == BoundaryRegime::vanishing, "r=1 regime");
    } else {
      ck.expect(std::abs(gap[k]) <= 0.05, "r=2 exponent gap " + g17(gap[k]));
      ck.expect(leading_order_errors(f, c).regime == BoundaryRegime::constant, "r=2 regime");
    }
  }
  return ck.outcome("dP/p* - dq/2: r=1 " + fmt("%.4f", gap[0]) + ", r=2 " + fmt("%+.4f", gap[1]));
}

// ---------------------------------------------------------------- 9
Outcome rademacher() {
  Check ck;
  ck.expect(rad_bound_generic(1, 1, 1, 4, 1, 1) == std::sqrt(0.5) + 0.25, "generic example");
  ck.expect(std::abs(rad_bound_generic(1, 1, 1, 4, 1, 1) - 0.95711) < 5e-6, "generic 0.95711");
  ck.expect(rad_bound_l2_maha(2, 1, 4, 1, 4) == 1.125, "l2 Mahalanobis example");
  std::vector<double> ones{1, 1, 1}, quarter{0.25, 1, 3};
  const double clean = rad_bound_commuting(1.5, 2, 9, 0, ones);
  ck.expect(std::abs(rad_bound_commuting(1.5, 2, 9, 1, ones) - clean - 1.0 / 3) <= 1e-15,
            "commuting unit example");
  ck.expect(std::abs(rad_bound_commuting(1.5, 2, 9, 1, quarter) - clean - 2.0 / 3) <= 1e-15,
            "commuting factor 2");
  ck.expect(std::abs(rad_bound_lp(0.3, 1, 4, kInf, 2, 16) - 0.55) <= 1e-15, "lp d=4 example");
  ck.expect(std::abs(rad_bound_lp(0.3, 1, 7, 2, 2, 16) - 0.425) <= 1e-15, "lp self-dual example");
  ck.expect(rad_bound_lp(0.3, 0, 4, kInf, 2, 16) == 0.3, "lp eps=0");
  std::mt19937_64 gen(20240909);
  std::uniform_real_distribution<double> U;
  double worst = 0;
  for (int t = 0; t < 50; ++t) {
    std::size_t k = 2 + gen() % 7;
    std::vector<double> lambdas(k), alphas(k), prod(k);
    for (std::size_t i = 0; i < k; ++i) {
      lambdas[i] = 0.1 + 3 * U(gen);
      alphas[i] = 0.1 + 3 * U(gen);
      prod[i] = lambdas[i] * alphas[i];
    }
    double x = U(gen), WA = 0.5 + U(gen), eps = U(gen);
    int n = 1 + static_cast<int>(gen() % 200);
    double lmin = *std::min_element(lambdas.begin(), lambdas.end());
    double reduce = rad_bound_commuting(x, WA, n, eps, lambdas) - rad_bound_l2_maha(x, WA, n, eps, lmin);
    ck.expect(std::abs(reduce) <= 1e-14, "unit-alpha reduction off by " + g17(reduce));
    double second = rad_bound_commuting(x, WA, n, eps, prod) - rad_bound_commuting(x, WA, n, 0, prod);
    double witness = rad_commuting_witness_term(lambdas, alphas, WA, n, eps);
    worst = std::max(worst, std::abs(witness - second));
    ck.expect(std::abs(witness - second) <= 1e-12, "witness off by " + g17(witness - second));
  }
  return ck.outcome("examples exact, 50 witnesses, max gap " + fmt("%.1e", worst));
}

// ---------------------------------------------------------------- 10
std::string read_body(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::string out, line;
  while (std::getline(f, line))
    if (line.empty() || line[0] != '#') out += line + "\n";
  return out;
}

Outcome determinism(const std::string& csv1, const std::string& csv2) {
  Check ck;
  std::string a1, a2;
  identities(a1);
  scalar_suite(a2);
  ck.expect(!csv1.empty() && a1 == csv1, "criterion 1 CSV body differs on rerun");
  ck.expect(!csv2.empty() && a2 == csv2, "criterion 2 CSV body differs on rerun");

  namespace fs = std::filesystem;
  fs::path root = fs::temp_directory_path() / "rerm_acceptance_determinism";
  fs::remove_all(root);
  cli::RunOptions o;
  o.plots = false;
  o.overrides = {"alpha=1", "eps=0.2", "p=inf", "r=1", "lambda=0.05", "sweep.alphas=[1]",
                 "sweep.r_values=[1]", "sweep.tune=false"};
  std::ostringstream log;
  int ca = cli::run("alpha-sweep", "", (root / "a").string(), o, log);
  int cb = cli::run("alpha-sweep", "", (root / "b").string(), o, log);
  ck.expect(ca == 0 && cb == 0, "CLI solve failed: " + log.str());
  std::string ba = read_body(root / "a" / "alpha_sweep.csv");
  ck.expect(!ba.empty() && ba == read_body(root / "b" / "alpha_sweep.csv"),
            "single-solve CSV body differs");

  o.overrides = {"alpha=1", "eps=0.2", "p=inf", "r=2", "lambda=0.1", "sim.d=200", "sim.seeds=3",
                 "sim.tune=false"};
  ca = cli::run("simulate", "", (root / "sa").string(), o, log);
  cb = cli::run("simulate", "", (root / "sb").string(), o, log);
  ck.expect(ca == 0 && cb == 0, "CLI simulate failed: " + log.str());
  std::string sa = read_body(root / "sa" / "simulate.csv");
  ck.expect(!sa.empty() && sa == read_body(root / "sb" / "simulate.csv"),
            "seeded simulation CSV body differs");
  fs::remove_all(root);
  return ck.outcome("criteria 1-2 bodies (" + std::to_string(csv1.size() + csv2.size()) +
                    " bytes), one solve and one seeded simulation bit-identical");
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  auto wanted = [&](int k) { return only.empty() || only.count(k); };

  std::string csv1, csv2;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"identity and reduction suite", [&] { return identities(csv1); }},
      {"scalar calculus suite", [&] { return scalar_suite(csv2); }},
      {"quadrature vs Monte Carlo", quadrature_vs_monte_carlo},
      {"theory vs simulation, lp attack", theory_vs_simulation},
      {"regularization order transition", order_transition},
      {"phase diagram signs", phase_signs},
      {"SWFM dual-norm dominance", swfm_dominance},
      {"low-alpha scaling", low_alpha_scaling},
      {"Rademacher bounds", rademacher},
      {"determinism", [&] { return determinism(csv1, csv2); }},
  };

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!wanted(id)) continue;
    if (id == 10 && (csv1.empty() || csv2.empty())) {
      // criterion 10 compares against the first runs of criteria 1 and 2
      if (csv1.empty()) identities(csv1);
      if (csv2.empty()) scalar_suite(csv2);
    }
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d: %s | %s | %.1f s\n", o.pass ? "PASS" : "FAIL", id,
                criteria[k].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}

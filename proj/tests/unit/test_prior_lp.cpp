#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rerm/prior_lp.hpp"

using namespace rerm;

TEST(Zw, Examples) {
  EXPECT_NEAR(zw(PriorSpec::gaussian(1), 0, 0).value, 1.0, 1e-15);
  EXPECT_NEAR(zw(PriorSpec::gaussian(1), 0, 1).value, 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(zw(PriorSpec::sparse_binary(0.3), 0, 0).value, 1.0, 1e-15);
  // variance rho: 1/sqrt(rho L + 1) exp(rho g^2 / (2 (rho L + 1)))
  double rho = 0.6, g = 0.8, L = 1.7;
  EXPECT_NEAR(zw(PriorSpec::gaussian(rho), g, L).value,
              std::exp(rho * g * g / (2 * (rho * L + 1))) / std::sqrt(rho * L + 1), 1e-14);
  EXPECT_NEAR(zw(PriorSpec::sparse_binary(0.3), g, L).value,
              0.3 + 0.7 * std::exp(-L / 2) * std::cosh(g), 1e-14);
}

TEST(Zw, DerivativeAndLogForm) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> U;
  for (int t = 0; t < 200; ++t) {
    PriorSpec p = t % 2 ? PriorSpec::gaussian(0.3 + U(gen)) : PriorSpec::sparse_binary(0.1 + 0.8 * U(gen));
    double g = 6 * U(gen) - 3, L = 3 * U(gen), h = 1e-6;
    ZwValue z = zw(p, g, L);
    double fd = (zw(p, g + h, L).value - zw(p, g - h, L).value) / (2 * h);
    EXPECT_NEAR(z.dgamma, fd, 1e-7 * (1 + std::abs(fd)));
    ZwLog lg = zw_log(p, g, L);
    EXPECT_NEAR(lg.log_value, std::log(z.value), 1e-12);
    EXPECT_NEAR(lg.dlog, z.dgamma / z.value, 1e-12);
  }
}

TEST(FW, Examples) {
  EXPECT_NEAR(f_w(1.3, 0, 1e-12, 0.7, 2, 2), 1.3 / 0.7, 1e-10);
  EXPECT_NEAR(f_w(1.3, 0.2, 0.4, 0.7, 2, 2), 1.3 / (0.7 + 0.8 + 0.4), 1e-14);
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> U;
  for (int t = 0; t < 50; ++t) {
    double g = 6 * U(gen) - 3, lam = U(gen), L = 0.2 + 2 * U(gen);
    double soft = (g > 0 ? 1 : -1) * std::max(0.0, std::abs(g) - lam) / L;
    EXPECT_NEAR(f_w(g, 0, lam, L, 1, 2), soft, 1e-14);
    double grid = oracle::grid_prox([&](double z) { return lam * std::abs(z) / L; }, 1.0, g / L,
                                    20.0, 400001);
    EXPECT_NEAR(f_w(g, 0, lam, L, 1, 2), grid, 1e-6);
  }
}

TEST(FW, MatchesGridOracleForMixedPowers) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> U;
  const double es[] = {1.0, 1.5, 2.0, 3.0};
  for (int t = 0; t < 100; ++t) {
    double g = 6 * U(gen) - 3, lam = U(gen), ph = 0.5 * U(gen), L = 0.2 + 2 * U(gen);
    double r = es[gen() % 4], ps = es[gen() % 4];
    auto pen = [&](double z) {
      return (lam * std::pow(std::abs(z), r) + ph * std::pow(std::abs(z), ps)) / L;
    };
    double grid = oracle::grid_prox(pen, 1.0, g / L, 20.0, 400001);
    EXPECT_NEAR(f_w(g, ph, lam, L, r, ps), grid, 1e-6) << r << " " << ps;
  }
}

TEST(Nonhat, RidgeClosedForm) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> U;
  for (int t = 0; t < 20; ++t) {
    ProblemConfig c;
    c.lambda = 0.01 + U(gen);
    c.prior = PriorSpec::gaussian(0.5 + U(gen));
    c.norms = NormOrder::make(2, 2);
    c.eps = 0.1;
    c = validate_config(c);
    ConjugateOverlaps h = oracle::random_hats(gen, true);
    Overlaps o = nonhat_update_lp(h, c);
    const double A = h.Vhat + 2 * c.lambda + 2 * h.Phat, rho = c.prior.rho;
    EXPECT_NEAR(o.m, h.mhat * rho / A, 1e-8);
    EXPECT_NEAR(o.q, (h.mhat * h.mhat * rho + h.qhat) / (A * A), 1e-8);
    EXPECT_NEAR(o.V, 1 / A, 1e-8);
    EXPECT_NEAR(o.P, o.q, 1e-8);
  }
}

TEST(Nonhat, ZeroMhatGivesZeroM) {
  std::mt19937_64 gen(5);
  for (int t = 0; t < 20; ++t) {
    ProblemConfig c = oracle::random_lp_config(gen);
    ConjugateOverlaps h = oracle::random_hats(gen, true);
    h.mhat = 0;
    EXPECT_NEAR(nonhat_update_lp(h, c).m, 0.0, 1e-14);
  }
}

TEST(Nonhat, IntegrandsEvenInXi) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> U;
  for (int t = 0; t < 200; ++t) {
    ProblemConfig c = oracle::random_lp_config(gen);
    ConjugateOverlaps h = oracle::random_hats(gen, true);
    double xi = 8 * U(gen) - 4;
    Overlaps a = nonhat_integrand(xi, h, c), b = nonhat_integrand(-xi, h, c);
    auto tol = [](double v) { return 1e-14 * (1 + std::abs(v)); };
    EXPECT_NEAR(a.m, b.m, tol(a.m));
    EXPECT_NEAR(a.q, b.q, tol(a.q));
    EXPECT_NEAR(a.V, b.V, tol(a.V));
    EXPECT_NEAR(a.P, b.P, tol(a.P));
  }
}

TEST(Nonhat, EnvelopeIdentityForP) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> U;
  const double es[] = {1.0, 1.5, 2.0, 3.0};
  for (int t = 0; t < 100; ++t) {
    double g = 6 * U(gen) - 3, lam = 0.05 + U(gen), ph = 0.05 + 0.3 * U(gen), L = 0.2 + 2 * U(gen);
    double r = es[gen() % 4], ps = es[gen() % 4];
    auto value = [&](double phat) {
      double z = f_w(g, phat, lam, L, r, ps);
      double d = z - g / L;
      return 0.5 * d * d + (lam * std::pow(std::abs(z), r) + phat * std::pow(std::abs(z), ps)) / L;
    };
    double hstep = 1e-6;
    double fd = (value(ph + hstep) - value(ph - hstep)) / (2 * hstep);
    double env = std::pow(std::abs(f_w(g, ph, lam, L, r, ps)), ps) / L;
    EXPECT_LE(std::abs(fd - env), 1e-5 * std::max(env, 1e-3)) << r << " " << ps;
  }
}

TEST(Nonhat, FiniteDifferenceOptionAgrees) {
  std::mt19937_64 gen(8);
  NonhatOptions fd;
  fd.finite_difference = true;
  for (int t = 0; t < 10; ++t) {
    ProblemConfig c = oracle::random_lp_config(gen);
    ConjugateOverlaps h = oracle::random_hats(gen, true);
    Overlaps a = nonhat_update_lp(h, c), b = nonhat_update_lp(h, c, fd);
    EXPECT_NEAR(a.V, b.V, 1e-6);
    EXPECT_NEAR(a.m, b.m, 1e-12);
  }
}

TEST(Nonhat, MatchesTeacherSampledMonteCarlo) {
  std::mt19937_64 gen(9);
  for (int t = 0; t < 8; ++t) {
    ProblemConfig c = oracle::random_lp_config(gen);
    ConjugateOverlaps h = oracle::random_hats(gen, c.eps > 0);
    Overlaps o = nonhat_update_lp(h, c);
    oracle::McOverlaps mc = oracle::mc_nonhat_lp(h, c, 400000, 3000 + t);
    EXPECT_TRUE(mc.m.covers(o.m, 3.5)) << "z=" << mc.m.z(o.m);
    EXPECT_TRUE(mc.q.covers(o.q, 3.5)) << "z=" << mc.q.z(o.q);
    EXPECT_TRUE(mc.V.covers(o.V, 3.5)) << "z=" << mc.V.z(o.V);
    EXPECT_TRUE(mc.P.covers(o.P, 3.5)) << "z=" << mc.P.z(o.P);
  }
}

TEST(Nonhat, RootRatioConventionIsSelectable) {
  ProblemConfig c;
  c = validate_config(c);
  ConjugateOverlaps h{0.8, 0.5, 1.0, 0.0};
  NonhatOptions mt;
  mt.convention = ZwConvention::root_ratio;
  Overlaps a = nonhat_update_lp(h, c), b = nonhat_update_lp(h, c, mt);
  EXPECT_TRUE(std::isfinite(b.m));
  EXPECT_GT(std::abs(a.m - b.m), 1e-6);
}

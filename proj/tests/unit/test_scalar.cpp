#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "rerm/scalar.hpp"

using namespace rerm;

namespace {

struct Instance {
  ScalarFunction f;
  double V, omega;
};

// Random member of the families used by the model, plus a custom convex
// function that goes through the generic minimiser.
ScalarFunction random_function(std::mt19937_64& gen, bool smooth_only = false) {
  std::uniform_real_distribution<double> U;
  double y = U(gen) < 0.5 ? 1.0 : -1.0, s = 2 * U(gen);
  int kinds = smooth_only ? 4 : 6;
  switch (gen() % kinds) {
    case 0:
      return ScalarFunction::logistic_loss(y, s);
    case 1:
      return ScalarFunction::quadratic(0.1 + 3 * U(gen));
    case 2: {
      const double e[] = {1.5, 2.0, 3.0};
      return ScalarFunction::power_penalty(0.1 + U(gen), e[gen() % 3], U(gen), e[gen() % 3]);
    }
    case 3: {
      double a = 0.5 + U(gen), b = U(gen);
      return ScalarFunction::custom([a, b](double x) { return std::log(std::cosh(a * x)) + b * x; });
    }
    case 4:
      return ScalarFunction::hinge_loss(y, s);
    default: {
      const double e[] = {1.0, 1.5, 2.0};
      return ScalarFunction::power_penalty(0.1 + U(gen), 1.0, U(gen), e[gen() % 3]);
    }
  }
}

Instance random_instance(std::mt19937_64& gen, bool smooth_only = false) {
  std::uniform_real_distribution<double> U;
  return {random_function(gen, smooth_only), 0.1 + 3 * U(gen), 6 * U(gen) - 3};
}

}  // namespace

TEST(Prox, Examples) {
  EXPECT_DOUBLE_EQ(prox(ScalarFunction::zero(), 1.0, 0.7), 0.7);
  for (double a : {0.5, 1.0, 4.0}) {
    auto q = ScalarFunction::quadratic(a);
    EXPECT_NEAR(prox(q, 1.0, 1.3), 1.3 / (1 + a), 1e-14);
    EXPECT_NEAR(moreau(q, 1.0, 1.0), a / (2 * (1 + a)), 1e-14);
    EXPECT_NEAR(moreau_grad(q, 1.0, 1.0), a / (1 + a), 1e-14);
  }
  EXPECT_EQ(moreau(ScalarFunction::zero(), 2.0, 3.0), 0.0);
  EXPECT_EQ(moreau_grad(ScalarFunction::zero(), 2.0, 3.0), 0.0);
}

TEST(Prox, Nonexpansive) {
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> U;
  for (int t = 0; t < 1000; ++t) {
    auto inst = random_instance(gen);
    double a = 8 * U(gen) - 4, b = 8 * U(gen) - 4;
    double pa = prox(inst.f, inst.V, a), pb = prox(inst.f, inst.V, b);
    EXPECT_LE(std::abs(pa - pb), std::abs(a - b) + 1e-12) << "pair " << t;
  }
}

TEST(Prox, MatchesGridOracle) {
  std::mt19937_64 gen(202);
  for (int t = 0; t < 200; ++t) {
    auto inst = random_instance(gen);
    double x = prox(inst.f, inst.V, inst.omega);
    double g = oracle::grid_prox([&](double u) { return inst.f(u); }, inst.V, inst.omega, 20.0,
                                 400001);
    EXPECT_NEAR(x, g, 1e-3) << "instance " << t;
  }
}

TEST(Moreau, GradientMatchesFiniteDifference) {
  std::mt19937_64 gen(303);
  const double h = 1e-5;
  for (int t = 0; t < 100; ++t) {
    auto inst = random_instance(gen, true);
    double g = moreau_grad(inst.f, inst.V, inst.omega);
    double fd = (moreau(inst.f, inst.V, inst.omega + h) - moreau(inst.f, inst.V, inst.omega - h)) /
                (2 * h);
    EXPECT_LE(std::abs(g - fd), 1e-5 * std::max(std::abs(g), 1e-3)) << "instance " << t;
  }
}

TEST(Moreau, BelowFunction) {
  std::mt19937_64 gen(404);
  for (int t = 0; t < 500; ++t) {
    auto inst = random_instance(gen);
    EXPECT_LE(moreau(inst.f, inst.V, inst.omega), inst.f(inst.omega) + 1e-12);
  }
}

TEST(Moreau, MatchesGridOracleValue) {
  std::mt19937_64 gen(405);
  for (int t = 0; t < 50; ++t) {
    auto inst = random_instance(gen);
    double g = oracle::grid_prox([&](double u) { return inst.f(u); }, inst.V, inst.omega, 20.0,
                                 400001);
    double val = (g - inst.omega) * (g - inst.omega) / (2 * inst.V) + inst.f(g);
    EXPECT_NEAR(moreau(inst.f, inst.V, inst.omega), val, 1e-6) << "instance " << t;
  }
}

TEST(Prox, ShiftProperty) {
  std::mt19937_64 gen(505);
  std::uniform_real_distribution<double> U;
  for (int t = 0; t < 300; ++t) {
    auto inst = random_instance(gen);
    double u = 4 * U(gen) - 2;
    double lhs = prox(inst.f.shifted(u), inst.V, inst.omega);
    double rhs = -u + prox(inst.f, inst.V, inst.omega + u);
    EXPECT_NEAR(lhs, rhs, 1e-9) << "instance " << t;
  }
}

TEST(Prox, ShiftPropertyForCustomFunctions) {
  // Explicitly shifted evaluator, so the minimiser really solves a different problem.
  std::mt19937_64 gen(506);
  std::uniform_real_distribution<double> U;
  for (int t = 0; t < 100; ++t) {
    double a = 0.5 + U(gen), u = 4 * U(gen) - 2, V = 0.2 + U(gen), w = 4 * U(gen) - 2;
    auto f = [a](double x) { return std::log(std::cosh(a * x)) + std::exp(0.3 * x); };
    auto fu = ScalarFunction::custom([=](double x) { return f(x + u); });
    double lhs = prox(fu, V, w);
    double rhs = -u + prox(ScalarFunction::custom(f), V, w + u);
    EXPECT_NEAR(lhs, rhs, 1e-9);
  }
}

TEST(Prox, DerivativeMatchesFiniteDifference) {
  std::mt19937_64 gen(606);
  for (int t = 0; t < 200; ++t) {
    auto inst = random_instance(gen, true);
    double h = 1e-6;
    double fd = (prox(inst.f, inst.V, inst.omega + h) - prox(inst.f, inst.V, inst.omega - h)) /
                (2 * h);
    EXPECT_NEAR(prox_derivative(inst.f, inst.V, inst.omega), fd, 1e-5) << "instance " << t;
  }
}

TEST(PowerProx, ClosedForms) {
  // r = p* = 2: gamma / (Lambda + 2 lambda + 2 phat)
  EXPECT_NEAR(power_prox(1.7, 1.3, 0.4, 2, 0.2, 2), 1.7 / (1.3 + 0.8 + 0.4), 1e-14);
  // soft threshold
  EXPECT_NEAR(power_prox(1.7, 1.3, 0.4, 1, 0, 2), (1.7 - 0.4) / 1.3, 1e-14);
  EXPECT_EQ(power_prox(0.3, 1.3, 0.4, 1, 0, 2), 0.0);
  EXPECT_NEAR(power_prox(-1.7, 1.3, 0.4, 1, 0, 2), -(1.7 - 0.4) / 1.3, 1e-14);
}

TEST(Minimize, BrentAndBracketGrowth) {
  auto f = [](double x) { return (x - 3.2) * (x - 3.2) + 1.0; };
  MinimizeResult r = brent_minimize(f, 0, 1, 10);
  EXPECT_NEAR(r.x, 3.2, 1e-8);
  MinimizeResult g = minimize_convex(f, -40);
  EXPECT_NEAR(g.x, 3.2, 1e-8);
  EXPECT_NEAR(g.fx, 1.0, 1e-14);
  EXPECT_THROW(minimize_convex([](double x) { return -x; }, 0), std::runtime_error);
}

TEST(GaussHermite, Examples) {
  EXPECT_NEAR(gauss_hermite_expect([](double) { return 1.0; }), 1.0, 1e-13);
  EXPECT_NEAR(gauss_hermite_expect([](double x) { return x * x; }), 1.0, 1e-12);
  EXPECT_NEAR(gauss_hermite_expect([](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }),
              0.5, 1e-12);
  EXPECT_NEAR(gauss_hermite_expect([](double x) { return std::pow(x, 4); }, 20), 3.0, 1e-11);
}

TEST(GaussHermite, HalfNormalCdfByMonteCarlo) {
  // Same expectation as above, estimated independently.
  std::mt19937_64 gen(77);
  std::normal_distribution<double> N;
  oracle::Moments m;
  for (int i = 0; i < 1000000; ++i) m.add(0.5 * std::erfc(-N(gen) / std::sqrt(2.0)));
  double gh = gauss_hermite_expect([](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); });
  EXPECT_LE(std::abs(gh - m.mean), 4 * m.se());
}

TEST(GaussHermite, AgreesWithAdaptiveIntegral) {
  std::vector<std::function<double(double)>> gs = {
      [](double x) { return std::cos(x); },
      [](double x) { return std::tanh(2 * x - 0.3); },
      [](double x) { return 1.0 / (1.0 + x * x); },
      [](double x) { return std::exp(-0.5 * (x - 1) * (x - 1)); },
      [](double x) { return std::sin(x) * std::sin(x); },
  };
  for (const auto& g : gs) {
    double gh = gauss_hermite_expect(g, 129);
    double ad = adaptive_integral([&](double x) { return g(x) * normal_pdf(x); }, -12, 12, 1e-12);
    EXPECT_NEAR(gh, ad, 1e-8);
  }
}

TEST(Adaptive, Examples) {
  EXPECT_NEAR(adaptive_integral([](double) { return 1.0; }, 0, 1), 1.0, 1e-12);
  EXPECT_NEAR(adaptive_integral([](double x) { return x; }, 0, 2), 2.0, 1e-12);
  EXPECT_NEAR(adaptive_integral(normal_pdf, 0, 1), 0.341344746068543, 1e-9);
  EXPECT_NEAR(normal_cdf(1.0) - 0.5, 0.341344746068543, 1e-14);
}

TEST(PanelRule, IntegratesKinkedFunctionsExactly) {
  PanelSpec spec;
  spec.breakpoints = {-0.7, 0.4};
  auto rule = piecewise_gaussian_rule(spec);
  double s = 0, k = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    s += rule.weights[i];
    k += rule.weights[i] * std::max(0.0, rule.nodes[i] - 0.4);
  }
  EXPECT_NEAR(s, 1.0, 1e-13);
  // E[(xi - c)_+] = phi(c) - c (1 - Phi(c))
  EXPECT_NEAR(k, normal_pdf(0.4) - 0.4 * (1 - normal_cdf(0.4)), 1e-13);
}

TEST(ScalarFunction, MidpointConvexity) {
  std::mt19937_64 gen(909);
  std::uniform_real_distribution<double> U;
  for (int t = 0; t < 500; ++t) {
    auto f = random_function(gen);
    double a = 10 * U(gen) - 5, b = 10 * U(gen) - 5;
    EXPECT_LE(f(0.5 * (a + b)), 0.5 * (f(a) + f(b)) + 1e-12);
  }
}

#pragma once

#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rerm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Dual exponent of p: 1/p + 1/p* = 1. p = inf maps to exactly 1 and back.
double dual_exponent(double p);

struct NormOrder {
  double p = 2.0;  // attack norm, may be kInf
  double r = 2.0;  // regularization order
  double pstar = 2.0;

  static NormOrder make(double p, double r) { return {p, r, dual_exponent(p)}; }
};

struct ChannelSpec {
  enum class Kind { probit, noisy_sign };
  Kind kind = Kind::probit;
  double noise = 0.0;  // tau for probit, Delta (variance) for noisy_sign

  static ChannelSpec probit(double tau) { return {Kind::probit, tau}; }
  static ChannelSpec noisy_sign(double delta) { return {Kind::noisy_sign, delta}; }
  // Label-noise variance entering the error formulas.
  double tau_sq() const { return kind == Kind::probit ? noise * noise : 0.0; }
};

struct PriorSpec {
  enum class Kind { gaussian, sparse_binary };
  Kind kind = Kind::gaussian;
  // gaussian: variance. sparse_binary: probability of a zero entry, nonzero
  // entries are +-1 with equal probability.
  double rho = 1.0;

  static PriorSpec gaussian(double rho) { return {Kind::gaussian, rho}; }
  static PriorSpec sparse_binary(double rho) { return {Kind::sparse_binary, rho}; }
  double second_moment() const { return kind == Kind::gaussian ? rho : 1.0 - rho; }
};

struct SpectralAtom {
  double theta_bar_sq = 1.0;  // squared teacher component after the Sigma_x rotation
  double omega = 1.0;         // Sigma_x eigenvalue
  double zeta = 1.0;          // eigenvalue of the matrix defining the dual-norm penalty
  double w = 1.0;             // Sigma_w eigenvalue
  double weight = 1.0;
};

struct SpectralMeasure {
  std::vector<SpectralAtom> atoms;

  void validate() const;
  // Teacher signal variance E[theta_bar^2 / omega].
  double rho() const;
};

enum class Loss { logistic, hinge };

// Rule used for the Gaussian expectations of the saddle-point equations.
// panels: Gauss-Legendre panels with edges on the known kinks of the
// integrand. gauss_hermite: a single global rule.
enum class Quadrature { panels, gauss_hermite };
enum class Geometry { lp, mahalanobis };

struct ProblemConfig {
  double alpha = 1.0;
  double eps = 0.0;  // theory-scale budget
  double lambda = 1.0;
  NormOrder norms;
  ChannelSpec channel;
  PriorSpec prior;
  Loss loss = Loss::logistic;
  Geometry geometry = Geometry::lp;
  SpectralMeasure measure;  // used when geometry == mahalanobis

  // Variance of the noiseless teacher field.
  double teacher_rho() const;
};

struct Overlaps {
  double m = 0.1;
  double q = 1.0;
  double V = 1.0;
  double P = 1.0;
};

struct ConjugateOverlaps {
  double mhat = 0.0;
  double qhat = 0.0;
  double Vhat = 0.0;
  double Phat = 0.0;
};

struct ErrorReport {
  double e_gen = 0.0;
  double e_bnd = 0.0;
  double e_rob = 0.0;
  double teacher_margin = 0.0;
};

// Returns cfg with norms.pstar populated; throws ConfigError.
ProblemConfig validate_config(ProblemConfig cfg);

void check_overlaps(const Overlaps& ov, double rho, double tol = 1e-8);

double lp_norm(std::span<const double> v, double p);

std::string to_string(Loss loss);
std::string to_string(Geometry g);
std::string to_string(ChannelSpec::Kind k);
std::string to_string(PriorSpec::Kind k);
Loss parse_loss(const std::string& s);
Geometry parse_geometry(const std::string& s);

}  // namespace rerm

#pragma once

#include <functional>
#include <span>
#include <vector>

namespace rerm {

double normal_pdf(double x);
double normal_cdf(double x);

// Convex scalar function with a descriptor so prox can use a specialised
// solver where one exists. Custom functions go through Brent.
class ScalarFunction {
 public:
  enum class Family { zero, quadratic, logistic, hinge, power_penalty, custom };

  static ScalarFunction zero();
  // a x^2 / 2
  static ScalarFunction quadratic(double a);
  // x -> g(y x - shift) for the logistic and hinge losses
  static ScalarFunction logistic_loss(double y, double shift);
  static ScalarFunction hinge_loss(double y, double shift);
  // x -> lambda |x|^r + phat |x|^pstar
  static ScalarFunction power_penalty(double lambda, double r, double phat, double pstar);
  static ScalarFunction custom(std::function<double(double)> f);

  // x -> f(x + u)
  ScalarFunction shifted(double u) const;

  double operator()(double x) const;
  Family family() const { return family_; }
  double offset() const { return offset_; }

 private:
  friend double prox(const ScalarFunction&, double, double);
  friend double prox_derivative(const ScalarFunction&, double, double);

  double base(double x) const;

  Family family_ = Family::zero;
  double a_ = 0, b_ = 0, c_ = 0, d_ = 0;
  double offset_ = 0;
  std::function<double(double)> fn_;
};

// argmin_x (x - omega)^2 / (2V) + f(x)
double prox(const ScalarFunction& f, double V, double omega);
// d prox / d omega. Closed form from implicit differentiation for the known
// families; central difference for custom functions.
double prox_derivative(const ScalarFunction& f, double V, double omega);
double moreau(const ScalarFunction& f, double V, double omega);
double moreau_grad(const ScalarFunction& f, double V, double omega);

// Unique minimiser of lambda|z|^r + phat|z|^pstar + (Lambda/2) z^2 - gamma z.
double power_prox(double gamma, double Lambda, double lambda, double r, double phat, double pstar);
double power_prox_derivative(double z, double Lambda, double lambda, double r, double phat,
                             double pstar);

struct MinimizeResult {
  double x = 0;
  double fx = 0;
  int evaluations = 0;
};

// Brent minimisation on a bracket a < b < c with f(b) <= min(f(a), f(c)).
MinimizeResult brent_minimize(const std::function<double(double)>& f, double a, double b,
                              double c, double tol = 1e-10, int max_iter = 500);
// Grows a bracket geometrically around x0 (step 1, doubling, at most 60 times)
// and then runs brent_minimize. Throws std::runtime_error if no bracket is found.
MinimizeResult minimize_convex(const std::function<double(double)>& f, double x0,
                               double tol = 1e-10);

// Probabilists' Gauss-Hermite rule: sum w_i g(x_i) ~ E[g(xi)], xi ~ N(0,1).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussHermiteRule& gauss_hermite_rule(int n = 129);
double gauss_hermite_expect(const std::function<double(double)>& g, int nodes = 129);

struct GaussLegendreRule {
  std::vector<double> nodes;  // on [-1, 1]
  std::vector<double> weights;
};
const GaussLegendreRule& gauss_legendre_rule(int n);

// Rule for E[g(u)], u ~ N(0,1), built from Gauss-Legendre panels on [-L, L].
// Panel edges include every breakpoint and the points bp +- scale 3^k around
// each refined breakpoint, so kinks and steep transitions of known location
// fall on panel edges. Weights carry the normal density.
struct PanelSpec {
  std::vector<double> breakpoints;  // kinks of the integrand
  std::vector<double> refine_at;    // centres of steep but smooth transitions
  double refine_scale = 1.0;        // transition width at those centres
  int nodes_per_panel = 12;
  double max_panel = 1.5;
  double half_width = 9.0;
};
GaussHermiteRule piecewise_gaussian_rule(const PanelSpec& spec);

// Adaptive Simpson quadrature. Throws std::runtime_error on depth exhaustion.
double adaptive_integral(const std::function<double(double)>& g, double a, double b,
                         double tol = 1e-10);

}  // namespace rerm

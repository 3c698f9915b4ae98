#include "rerm/scalar.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace rerm {

namespace {

double logistic_value(double u) {
  return u > 0 ? std::log1p(std::exp(-u)) : -u + std::log1p(std::exp(u));
}

// sigma(-u) = 1 / (1 + e^u), equal to -g'(u) for the logistic loss.
double logistic_neg_slope(double u) {
  if (u > 0) {
    double e = std::exp(-u);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(u));
}

double logistic_curvature(double u) {
  double s = logistic_neg_slope(u);
  return s * (1.0 - s);
}

double logistic_prox(double y, double shift, double V, double omega) {
  if (y == 0.0) return omega;
  // h(x) = (x - omega)/V - y sigma(-(y x - shift)) is increasing; the root
  // lies between omega and omega + V y.
  double lo = std::min(omega, omega + V * y);
  double hi = std::max(omega, omega + V * y);
  double x = omega + V * y * logistic_neg_slope(y * omega - shift);
  double prev_h = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    double u = y * x - shift;
    double h = (x - omega) / V - y * logistic_neg_slope(u);
    if (h == 0.0) return x;
    if (h > 0) hi = x; else lo = x;
    double dh = 1.0 / V + y * y * logistic_curvature(u);
    double next = x - h / dh;
    // Newton can 2-cycle inside the bracket for large V; bisect when |h| stalls.
    if (!(next > lo && next < hi) || std::abs(h) > 0.5 * prev_h) next = 0.5 * (lo + hi);
    prev_h = std::abs(h);
    if (std::abs(next - x) <= 1e-15 * (1.0 + std::abs(x))) return next;
    x = next;
  }
  return x;
}

double hinge_prox(double y, double shift, double V, double omega) {
  if (y == 0.0) return omega;
  if (y * omega - shift >= 1.0) return omega;
  double slope = omega + V * y;
  if (y * slope - shift <= 1.0) return slope;
  return (1.0 + shift) / y;
}

double hinge_prox_derivative(double y, double shift, double V, double omega) {
  if (y == 0.0) return 1.0;
  if (y * omega - shift >= 1.0) return 1.0;
  if (y * (omega + V * y) - shift <= 1.0) return 1.0;
  return 0.0;
}

// Smallest positive t solving c t^(e-1) = rhs.
double single_term_root(double c, double e, double rhs) {
  if (e == 2.0) return rhs / (2.0 * c);
  return std::pow(rhs / (c * e), 1.0 / (e - 1.0));
}

}  // namespace

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

ScalarFunction ScalarFunction::zero() { return {}; }

ScalarFunction ScalarFunction::quadratic(double a) {
  if (!(a >= 0)) throw std::invalid_argument("quadratic coefficient must be nonnegative");
  ScalarFunction f;
  f.family_ = Family::quadratic;
  f.a_ = a;
  return f;
}

ScalarFunction ScalarFunction::logistic_loss(double y, double shift) {
  ScalarFunction f;
  f.family_ = Family::logistic;
  f.a_ = y;
  f.b_ = shift;
  return f;
}

ScalarFunction ScalarFunction::hinge_loss(double y, double shift) {
  ScalarFunction f;
  f.family_ = Family::hinge;
  f.a_ = y;
  f.b_ = shift;
  return f;
}

ScalarFunction ScalarFunction::power_penalty(double lambda, double r, double phat, double pstar) {
  if (!(lambda >= 0 && phat >= 0 && r >= 1 && pstar >= 1))
    throw std::invalid_argument("power penalty needs nonnegative weights and exponents >= 1");
  ScalarFunction f;
  f.family_ = Family::power_penalty;
  f.a_ = lambda;
  f.b_ = r;
  f.c_ = phat;
  f.d_ = pstar;
  return f;
}

ScalarFunction ScalarFunction::custom(std::function<double(double)> fn) {
  ScalarFunction f;
  f.family_ = Family::custom;
  f.fn_ = std::move(fn);
  return f;
}

ScalarFunction ScalarFunction::shifted(double u) const {
  ScalarFunction f = *this;
  f.offset_ += u;
  return f;
}

double ScalarFunction::base(double x) const {
  switch (family_) {
    case Family::zero:
      return 0.0;
    case Family::quadratic:
      return 0.5 * a_ * x * x;
    case Family::logistic:
      return logistic_value(a_ * x - b_);
    case Family::hinge:
      return std::max(0.0, 1.0 - (a_ * x - b_));
    case Family::power_penalty: {
      double ax = std::abs(x);
      double v = 0.0;
      if (a_ != 0.0) v += a_ * std::pow(ax, b_);
      if (c_ != 0.0) v += c_ * std::pow(ax, d_);
      return v;
    }
    case Family::custom:
      return fn_(x);
  }
  return 0.0;
}

double ScalarFunction::operator()(double x) const { return base(x + offset_); }

double power_prox(double gamma, double Lambda, double lambda, double r, double phat,
                  double pstar) {
  if (!(Lambda > 0)) throw std::invalid_argument("power_prox needs Lambda > 0");
  double threshold = 0.0;
  struct Term { double c, e; };
  Term terms[2];
  int n = 0;
  double linear = Lambda;  // coefficient of t in the stationarity equation
  auto add = [&](double c, double e) {
    if (c == 0.0) return;
    if (e == 1.0) threshold += c;
    else if (e == 2.0) linear += 2.0 * c;
    else terms[n++] = {c, e};
  };
  add(lambda, r);
  add(phat, pstar);
  double rhs = std::abs(gamma) - threshold;
  if (rhs <= 0.0) return 0.0;
  double sign = gamma > 0 ? 1.0 : -1.0;
  if (n == 0) return sign * rhs / linear;

  // Each term is increasing in t, so the root sits below every single-term
  // root at rhs and above the smallest single-term root at rhs / (n + 1).
  double hi = rhs / linear, lo = rhs / (linear * (n + 1));
  for (int i = 0; i < n; ++i) {
    hi = std::min(hi, single_term_root(terms[i].c, terms[i].e, rhs));
    lo = std::min(lo, single_term_root(terms[i].c, terms[i].e, rhs / (n + 1)));
  }
  auto phi = [&](double t, double& dphi) {
    double v = linear * t - rhs;
    dphi = linear;
    for (int i = 0; i < n; ++i) {
      double pw = std::pow(t, terms[i].e - 2.0);
      v += terms[i].c * terms[i].e * pw * t;
      dphi += terms[i].c * terms[i].e * (terms[i].e - 1.0) * pw;
    }
    return v;
  };
  double t = hi;
  double prev_v = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 300; ++it) {
    double dphi;
    double v = phi(t, dphi);
    if (v == 0.0) break;
    if (v > 0) hi = t; else lo = t;
    double next = t - v / dphi;
    if (!(next > lo && next < hi) || std::abs(v) > 0.5 * prev_v) next = 0.5 * (lo + hi);
    prev_v = std::abs(v);
    if (std::abs(next - t) <= 4e-16 * t) { t = next; break; }
    t = next;
  }
  return sign * t;
}

double power_prox_derivative(double z, double Lambda, double lambda, double r, double phat,
                             double pstar) {
  double denom = Lambda;
  if (z == 0.0) {
    // Dead zone of a kink, or an infinite-curvature term with exponent in (1, 2).
    for (auto [c, e] : {std::pair{lambda, r}, std::pair{phat, pstar}}) {
      if (c == 0.0) continue;
      if (e < 2.0) return 0.0;
      if (e == 2.0) denom += 2.0 * c;
    }
    return 1.0 / denom;
  }
  double az = std::abs(z);
  for (auto [c, e] : {std::pair{lambda, r}, std::pair{phat, pstar}}) {
    if (c == 0.0 || e == 1.0) continue;
    denom += c * e * (e - 1.0) * std::pow(az, e - 2.0);
  }
  return 1.0 / denom;
}

double prox(const ScalarFunction& f, double V, double omega) {
  if (!(V > 0)) throw std::invalid_argument("prox needs V > 0");
  double w = omega + f.offset_;
  double x = 0.0;
  switch (f.family_) {
    case ScalarFunction::Family::zero:
      x = w;
      break;
    case ScalarFunction::Family::quadratic:
      x = w / (1.0 + f.a_ * V);
      break;
    case ScalarFunction::Family::logistic:
      x = logistic_prox(f.a_, f.b_, V, w);
      break;
    case ScalarFunction::Family::hinge:
      x = hinge_prox(f.a_, f.b_, V, w);
      break;
    case ScalarFunction::Family::power_penalty:
      x = power_prox(w / V, 1.0 / V, f.a_, f.b_, f.c_, f.d_);
      break;
    case ScalarFunction::Family::custom: {
      auto obj = [&](double t) { return (t - w) * (t - w) / (2.0 * V) + f.fn_(t); };
      x = minimize_convex(obj, w).x;
      // Brent on values stops near sqrt(machine eps); bisect the
      // central-difference slope when it brackets a root (smooth f).
      auto slope = [&](double t) {
        const double h = 1e-5 * (1.0 + std::abs(t));
        return (t - w) / V + (f.fn_(t + h) - f.fn_(t - h)) / (2.0 * h);
      };
      double span = 1e-6 * (1.0 + std::abs(x)), lo = x - span, hi = x + span;
      if (slope(lo) < 0.0 && slope(hi) > 0.0) {
        for (int it = 0; it < 60 && hi - lo > 1e-15 * (1.0 + std::abs(x)); ++it) {
          double mid = 0.5 * (lo + hi);
          (slope(mid) < 0.0 ? lo : hi) = mid;
        }
        x = 0.5 * (lo + hi);
      }
      break;
    }
  }
  return x - f.offset_;
}

double prox_derivative(const ScalarFunction& f, double V, double omega) {
  double w = omega + f.offset_;
  switch (f.family_) {
    case ScalarFunction::Family::zero:
      return 1.0;
    case ScalarFunction::Family::quadratic:
      return 1.0 / (1.0 + f.a_ * V);
    case ScalarFunction::Family::logistic: {
      double x = logistic_prox(f.a_, f.b_, V, w);
      return 1.0 / (1.0 + V * f.a_ * f.a_ * logistic_curvature(f.a_ * x - f.b_));
    }
    case ScalarFunction::Family::hinge:
      return hinge_prox_derivative(f.a_, f.b_, V, w);
    case ScalarFunction::Family::power_penalty: {
      double z = power_prox(w / V, 1.0 / V, f.a_, f.b_, f.c_, f.d_);
      return power_prox_derivative(z, 1.0 / V, f.a_, f.b_, f.c_, f.d_) / V;
    }
    case ScalarFunction::Family::custom: {
      const double h = 1e-6;
      return (prox(f, V, omega + h) - prox(f, V, omega - h)) / (2.0 * h);
    }
  }
  return 0.0;
}

double moreau(const ScalarFunction& f, double V, double omega) {
  double x = prox(f, V, omega);
  return (x - omega) * (x - omega) / (2.0 * V) + f(x);
}

double moreau_grad(const ScalarFunction& f, double V, double omega) {
  return (omega - prox(f, V, omega)) / V;
}

MinimizeResult brent_minimize(const std::function<double(double)>& f, double a, double b,
                              double c, double tol, int max_iter) {
  const double cgold = 0.3819660112501051;
  const double zeps = 1e-300;
  if (a > c) std::swap(a, c);
  double x = b, w = b, v = b;
  double fx = f(x), fw = fx, fv = fx;
  int evals = 1;
  double d = 0.0, e = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    double xm = 0.5 * (a + c);
    double tol1 = 1.4901161193847656e-08 * std::abs(x) + tol / 3.0 + zeps;
    double tol2 = 2.0 * tol1;
    if (std::abs(x - xm) <= tol2 - 0.5 * (c - a)) break;
    if (std::abs(e) > tol1) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      double etemp = e;
      e = d;
      if (std::abs(p) >= std::abs(0.5 * q * etemp) || p <= q * (a - x) || p >= q * (c - x)) {
        e = (x >= xm) ? a - x : c - x;
        d = cgold * e;
      } else {
        d = p / q;
        double u = x + d;
        if (u - a < tol2 || c - u < tol2) d = std::copysign(tol1, xm - x);
      }
    } else {
      e = (x >= xm) ? a - x : c - x;
      d = cgold * e;
    }
    double u = std::abs(d) >= tol1 ? x + d : x + std::copysign(tol1, d);
    double fu = f(u);
    ++evals;
    if (fu <= fx) {
      if (u >= x) a = x; else c = x;
      v = w; w = x; x = u;
      fv = fw; fw = fx; fx = fu;
    } else {
      if (u < x) a = u; else c = u;
      if (fu <= fw || w == x) {
        v = w; w = u;
        fv = fw; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  return {x, fx, evals};
}

MinimizeResult minimize_convex(const std::function<double(double)>& f, double x0, double tol) {
  double h = 1.0;
  double f0 = f(x0), fl = f(x0 - h), fr = f(x0 + h);
  if (f0 <= fl && f0 <= fr) return brent_minimize(f, x0 - h, x0, x0 + h, tol);
  double dir = fr < f0 ? 1.0 : -1.0;
  double prev = x0, cur = x0 + dir * h, fcur = dir > 0 ? fr : fl;
  for (int k = 0; k < 60; ++k) {
    h *= 2.0;
    double next = cur + dir * h;
    double fnext = f(next);
    if (fnext >= fcur) return brent_minimize(f, prev, cur, next, tol);
    prev = cur;
    cur = next;
    fcur = fnext;
  }
  throw std::runtime_error("minimize_convex: bracket not found after 60 doublings");
}

namespace {

GaussHermiteRule build_gauss_hermite(int n) {
  // Golub-Welsch start, then Newton polish on the orthonormal recurrence.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  GaussHermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    long double x = es.eigenvalues()(i);
    long double sumsq = 0;
    for (int pass = 0; pass < 3; ++pass) {
      // p_k orthonormal w.r.t. N(0,1); p_n' = sqrt(n) p_{n-1}.
      long double p0 = 1, p1 = x;
      sumsq = 1 + x * x;
      for (int k = 1; k < n - 1; ++k) {
        long double p2 = (x * p1 - std::sqrt(static_cast<long double>(k)) * p0) /
                         std::sqrt(static_cast<long double>(k + 1));
        p0 = p1;
        p1 = p2;
        sumsq += p1 * p1;
      }
      long double pn = (x * p1 - std::sqrt(static_cast<long double>(n - 1)) * p0) /
                       std::sqrt(static_cast<long double>(n));
      if (n == 1) { pn = x; sumsq = 1; }
      long double dpn = std::sqrt(static_cast<long double>(n)) * (n == 1 ? 1.0L : p1);
      if (pass < 2) x -= pn / dpn;
    }
    rule.nodes[i] = static_cast<double>(x);
    rule.weights[i] = static_cast<double>(1.0L / sumsq);
  }
  // Symmetrise to remove rounding asymmetry.
  for (int i = 0; i < n / 2; ++i) {
    double x = 0.5 * (rule.nodes[n - 1 - i] - rule.nodes[i]);
    double w = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite_rule(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite_rule needs n >= 1");
  static std::mutex mu;
  static std::map<int, GaussHermiteRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss_hermite(n)).first;
  return it->second;
}

double gauss_hermite_expect(const std::function<double(double)>& g, int nodes) {
  const auto& rule = gauss_hermite_rule(nodes);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * g(rule.nodes[i]);
  return s;
}

namespace {

GaussLegendreRule build_gauss_legendre(int n) {
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    long double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    long double dp = 1;
    for (int it = 0; it < 100; ++it) {
      long double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) { p1 = x; p0 = 1; }
      dp = n * (x * p1 - p0) / (x * x - 1);
      long double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-19L) break;
    }
    rule.nodes[n - 1 - i] = static_cast<double>(x);
    rule.weights[n - 1 - i] = static_cast<double>(2.0L / ((1 - x * x) * dp * dp));
  }
  return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre_rule(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_rule needs n >= 1");
  static std::mutex mu;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
  return it->second;
}

GaussHermiteRule piecewise_gaussian_rule(const PanelSpec& spec) {
  const double L = spec.half_width;
  std::vector<double> edges{-L, L};
  for (double b : spec.breakpoints)
    if (std::abs(b) < L) edges.push_back(b);
  for (double c : spec.refine_at) {
    if (std::abs(c) < L) edges.push_back(c);
    for (double h = spec.refine_scale; h < 2.0 * L; h *= 3.0) {
      if (std::abs(c - h) < L) edges.push_back(c - h);
      if (std::abs(c + h) < L) edges.push_back(c + h);
    }
  }
  std::sort(edges.begin(), edges.end());
  const auto& gl = gauss_legendre_rule(spec.nodes_per_panel);
  GaussHermiteRule rule;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    double a = edges[k], b = edges[k + 1];
    if (b - a <= 1e-14) continue;
    int pieces = static_cast<int>(std::ceil((b - a) / spec.max_panel));
    double h = (b - a) / pieces;
    for (int p = 0; p < pieces; ++p) {
      double lo = a + p * h, mid = lo + 0.5 * h;
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        double u = mid + 0.5 * h * gl.nodes[i];
        rule.nodes.push_back(u);
        rule.weights.push_back(0.5 * h * gl.weights[i] * normal_pdf(u));
      }
    }
  }
  return rule;
}

namespace {

double simpson_step(const std::function<double(double)>& g, double a, double fa, double m,
                    double fm, double b, double fb, double whole, double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = g(lm), frm = g(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) throw std::runtime_error("adaptive_integral: recursion depth exhausted");
  return simpson_step(g, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(g, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_integral(const std::function<double(double)>& g, double a, double b,
                         double tol) {
  if (a > b) throw std::invalid_argument("adaptive_integral needs a <= b");
  if (a == b) return 0.0;
  // Four initial panels so a single symmetric Simpson sample cannot hide a bump.
  const int panels = 4;
  double h = (b - a) / panels, total = 0.0;
  for (int i = 0; i < panels; ++i) {
    double lo = a + i * h, hi = i == panels - 1 ? b : a + (i + 1) * h, mid = 0.5 * (lo + hi);
    double flo = g(lo), fmid = g(mid), fhi = g(hi);
    double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    total += simpson_step(g, lo, flo, mid, fmid, hi, fhi, whole, tol / panels, 50);
  }
  return total;
}

}  // namespace rerm

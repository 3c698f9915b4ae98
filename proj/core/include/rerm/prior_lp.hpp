#pragma once

#include "rerm/model.hpp"

namespace rerm {

struct ZwValue {
  double value = 0;
  double dgamma = 0;
};

// E_w[exp(-Lambda w^2 / 2 + gamma w)] under the prior, with d/dgamma.
ZwValue zw(const PriorSpec& prior, double gamma, double Lambda);

struct ZwLog {
  double log_value = 0;
  double dlog = 0;  // d log Z_w / d gamma
};
ZwLog zw_log(const PriorSpec& prior, double gamma, double Lambda);

// argmin_z lambda|z|^r + phat|z|^pstar + (Lambda/2) z^2 - gamma z
double f_w(double gamma, double phat, double lambda, double Lambda, double r, double pstar);
double df_w_dgamma(double gamma, double phat, double lambda, double Lambda, double r,
                   double pstar);

enum class ZwConvention {
  squared_ratio,  // Z_w(m^ xi / sqrt(q^), m^2 / q^)
  root_ratio,     // Z_w(m^ xi / sqrt(q^), m^ / sqrt(q^)); sensitivity comparison only
};

struct NonhatOptions {
  Quadrature quadrature = Quadrature::panels;
  int nodes = 129;
  int panel_nodes = 12;
  ZwConvention convention = ZwConvention::squared_ratio;
  bool finite_difference = false;  // d f_w / d gamma by central difference, h = 1e-6
};

Overlaps nonhat_update_lp(const ConjugateOverlaps& hats, const ProblemConfig& cfg,
                          const NonhatOptions& opt = {});

// The four integrands {dZw f_w, Zw f_w^2, Zw df_w, Zw |f_w|^p*} at one xi
// drawn from N(0,1). Exposed for Monte Carlo oracles.
Overlaps nonhat_integrand(double xi, const ConjugateOverlaps& hats, const ProblemConfig& cfg,
                          const NonhatOptions& opt = {});

}  // namespace rerm

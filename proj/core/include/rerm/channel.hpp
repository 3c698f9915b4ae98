#pragma once

#include "rerm/model.hpp"

namespace rerm {

double z0(const ChannelSpec& channel, double y, double omega, double V);
double dz0_domega(const ChannelSpec& channel, double y, double omega, double V);

// (prox of x -> V g(y x - shift) at omega, minus omega) / V
double f_g(Loss loss, double y, double omega, double V, double shift);
double df_g_domega(Loss loss, double y, double omega, double V, double shift);

// Margin reduction eps P^{1/p*} (lp) or eps sqrt(P) (mahalanobis).
double margin_shift(double P, const ProblemConfig& cfg);

// Factor multiplying E[sum_y Z0 y f_g] in the P-hat equation, without alpha.
double phat_prefactor(double P, const ProblemConfig& cfg);

struct HatOptions {
  Quadrature quadrature = Quadrature::panels;
  int nodes = 129;           // Gauss-Hermite order
  int panel_nodes = 12;      // Gauss-Legendre order per panel
  int label_nodes = 33;      // inner rule over label noise for noisy_sign
  bool reverse_labels = false;
  bool finite_difference = false;  // d f_g / d omega by central difference, h = 1e-6
  bool decouple_dual_norm = false;  // drop the P coupling entirely
};

ConjugateOverlaps hat_update(const Overlaps& ov, const ProblemConfig& cfg,
                             const HatOptions& opt = {});

// Integrand of the four hat expectations at one xi, without alpha and the
// P-hat prefactor: {dZ0 f_g, Z0 f_g^2, -Z0 df_g, Z0 y f_g} summed over labels.
// Exposed for Monte Carlo oracles.
struct HatIntegrand {
  double m = 0, q = 0, V = 0, P = 0;
};
HatIntegrand hat_integrand(double xi, const Overlaps& ov, const ProblemConfig& cfg,
                           const HatOptions& opt = {});

}  // namespace rerm

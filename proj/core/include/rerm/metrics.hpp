#pragma once

#include <span>

#include "rerm/model.hpp"

namespace rerm {

double e_gen(double m, double q, double rho, double tau);
// Upper limit eps P^{1/p*} / sqrt(q); pass pstar = 2 for the Mahalanobis norm.
double e_bnd(double m, double q, double P, double rho, double tau, double eps, double pstar);
double teacher_margin(double rho, double tau);
ErrorReport error_report(const Overlaps& ov, const ProblemConfig& cfg);
// Same with an explicit teacher variance, e.g. the empirical one of a finite sample.
ErrorReport error_report(const Overlaps& ov, const ProblemConfig& cfg, double rho);

double rad_bound_generic(double max_dual_x, double W, double sigma_sc, int n, double eps,
                         double sup_dual_w);
double rad_bound_l2_maha(double max_x2, double W2, int n, double eps,
                         double lambda_min_sigma_delta);
double rad_bound_commuting(double max_x_Ainv, double WA, int n, double eps,
                           std::span<const double> lambda_alpha_products);
double rad_bound_lp(double rad_clean, double eps, int d, double p, double r_norm, int n);

// Second term eps/(2 sqrt n) ||w||_{Sigma_delta^{-1}} evaluated on the explicit
// maximiser w = WA v_j / sqrt(alpha_j) for diagonal Sigma_delta = diag(lambdas)
// and regulariser matrix diag(alphas).
double rad_commuting_witness_term(std::span<const double> lambdas,
                                  std::span<const double> alphas, double WA, int n,
                                  double eps);

}  // namespace rerm

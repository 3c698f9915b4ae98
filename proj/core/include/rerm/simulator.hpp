#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "rerm/model.hpp"
#include "rerm/solver.hpp"

namespace rerm {

enum class CovarianceMode { isotropic, spectral };

// Finite-d sample. In spectral mode every matrix is diagonal; coordinates are
// assigned to the atoms of cfg.measure in proportion to their weights.
struct Dataset {
  Eigen::MatrixXd X;  // n x d
  Eigen::VectorXd y;  // +-1
  Eigen::VectorXd w_star;
  std::uint64_t seed = 0;
  CovarianceMode mode = CovarianceMode::isotropic;
  Eigen::VectorXd sigma_x;     // diagonal of Sigma_x
  Eigen::VectorXd sigma_zeta;  // diagonal of the dual-norm matrix (spectral mode)
  Eigen::VectorXd sigma_w;     // diagonal of the regularizer matrix (spectral mode)

  int n() const { return static_cast<int>(X.rows()); }
  int d() const { return static_cast<int>(X.cols()); }
  // w*' Sigma_x w* / d
  double teacher_norm() const;
};

// Probit labels only; noisy_sign is theory-side.
Dataset generate_dataset(const ProblemConfig& cfg, int d, std::uint64_t seed);

// Finite-d budget eps_f of the objective term (eps_f / sqrt d) ||w||_dual that
// matches the theory eps: eps sqrt(d) / d^{1/p*} for lp, eps for Mahalanobis.
double finite_eps(const ProblemConfig& cfg, int d);

// sum_i g(y_i <w, x_i>/sqrt d - (eps_f/sqrt d) ||w||_dual) + penalty(w), with
// penalty lambda ||w||_r^r (lp) or (lambda/2) w' Sigma_w w (Mahalanobis).
double rerm_objective(const Dataset& ds, const ProblemConfig& cfg, double eps_finite,
                      const Eigen::VectorXd& w);

// ||w||_{p*} for lp, sqrt(w' Sigma_zeta w) for Mahalanobis.
double dual_norm(const Dataset& ds, const ProblemConfig& cfg, const Eigen::VectorXd& w);

enum class Optimizer {
  automatic,    // accelerated for the logistic loss, subgradient otherwise
  subgradient,  // averaged subgradient descent, step eta0 / sqrt(t)
  accelerated,  // proximal gradient with momentum, backtracking and restarts
};

struct RermSettings {
  Optimizer method = Optimizer::automatic;
  double eta0 = 1.0;
  int subgradient_iters = 20000;
  int window = 1000;
  int max_iters = 20000;
  double tol = 1e-7;  // relative step size at which the accelerated method stops
};

struct RermResult {
  Eigen::VectorXd w;
  double objective = 0;
  int iterations = 0;
  bool converged = false;
  // Subgradient only: the last iterate of some window ended above its start by
  // more than 1e-6 relative.
  bool step_fault = false;
};

RermResult solve_rerm(const Dataset& ds, const ProblemConfig& cfg, double eps_finite,
                      const RermSettings& settings = {});

// (m, q, P) of w_hat; V is not observable and is NaN.
Overlaps empirical_overlaps(const Eigen::VectorXd& w_hat, const Dataset& ds,
                            const ProblemConfig& cfg);

// Errors on n_test fresh samples with the closed-form worst-case perturbation.
ErrorReport test_set_errors(const Eigen::VectorXd& w_hat, const Dataset& ds,
                            const ProblemConfig& cfg, double eps_finite, int n_test,
                            std::uint64_t seed);

struct SeedRow {
  std::uint64_t seed = 0;
  Overlaps overlaps;
  ErrorReport report;
  double objective = 0;
  bool optimizer_converged = false;
};

struct ComparisonSettings {
  int d = 1000;
  int seeds = 10;
  std::uint64_t base_seed = 1;
  bool use_test_set = false;
  int n_test = 100000;
  RermSettings rerm;
  SolverSettings solver;
  unsigned threads = 0;
};

struct Comparison {
  std::vector<SeedRow> rows;
  ErrorReport mean;
  ErrorReport std_error;
  Overlaps theory_overlaps;
  ErrorReport theory;
  bool theory_converged = false;
  double eps_finite = 0;
  // theory inside mean +- 3 SE, for e_gen, e_bnd, e_rob
  bool agree_gen = false, agree_bnd = false, agree_rob = false;
};

// Simulates at cfg.lambda; the theory side solves the same cfg.
Comparison compare_theory_simulation(const ProblemConfig& cfg, const ComparisonSettings& s);

}  // namespace rerm

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "rerm/model.hpp"

namespace rerm {

struct SolverSettings {
  double mu = 0.7;
  double tol = 1e-5;
  int max_iters = 5000;
  // mu is halved, down to mu_min, when the residual has not dropped by 10%
  // over stall_window iterations.
  double mu_min = 0.02;
  int stall_window = 50;
  Overlaps init{0.1, 1.0, 1.0, 1.0};
  Quadrature quadrature = Quadrature::panels;
  int nodes = 129;        // Gauss-Hermite order
  int panel_nodes = 12;   // Gauss-Legendre order per panel
  bool decouple_dual_norm = false;  // classical equations without the P coupling

  void validate() const;
};

struct SolveResult {
  Overlaps overlaps;
  ConjugateOverlaps hats;
  int iterations = 0;
  double residual = 0;      // final damped max-abs update of (m, q, V, P)
  double map_residual = 0;  // max-abs move of (m, q, V, P) under one undamped re-evaluation
  double hat_residual = 0;  // same for the hats
  double final_mu = 0;
  bool converged = false;
};

ConjugateOverlaps hat_step(const Overlaps& ov, const ProblemConfig& cfg,
                           const SolverSettings& s = {});
Overlaps nonhat_step(const ConjugateOverlaps& hats, const ProblemConfig& cfg,
                     const SolverSettings& s = {});

SolveResult solve_fixed_point(const ProblemConfig& cfg, const SolverSettings& settings = {});
// Starts from a previous state (overlaps and hats) instead of settings.init.
SolveResult solve_fixed_point(const ProblemConfig& cfg, const SolverSettings& settings,
                              const SolveResult& warm);

enum class Objective { e_rob, e_gen };

struct TuneSettings {
  double lo = 1e-6;
  double hi = 1e2;
  double rel_width = 1e-3;
  Objective objective = Objective::e_rob;
};

struct TuneResult {
  double lambda_star = 0;
  double objective = 0;
  ErrorReport report;
  SolveResult solve;
  int evaluations = 0;
  bool ok = false;  // at least one lambda converged
};

// Golden-section search on log(lambda); f may return +inf.
struct GoldenResult {
  double x = 0;
  double fx = 0;
  int evaluations = 0;
};
GoldenResult golden_section_log(const std::function<double(double)>& f, double lo, double hi,
                                double rel_width);

TuneResult tune_lambda(const ProblemConfig& cfg, const SolverSettings& settings = {},
                       const TuneSettings& tune = {}, const SolveResult* warm = nullptr);

struct SweepPoint {
  double r = 0;
  double lambda_star = 0;
  ErrorReport report;
  SolveResult solve;
  bool ok = false;
};

struct RSweepResult {
  std::vector<SweepPoint> points;
  std::optional<double> r_star;
  std::size_t failed = 0;
};

// Each grid point warm-starts from the previous converged state. With
// tune = false the lambda of cfg_base is used throughout.
RSweepResult sweep_regularization_order(const ProblemConfig& cfg_base,
                                        const std::vector<double>& r_grid, bool tune,
                                        const SolverSettings& settings = {},
                                        const TuneSettings& ts = {});

struct PhaseDiagram {
  std::vector<double> alphas;
  std::vector<double> eps;
  std::vector<std::vector<double>> delta;  // [alpha][eps]: E_rob(rA) - E_rob(rB)
  std::size_t failed = 0;
};

// Rows run in parallel on `threads` workers (0 = hardware concurrency); within
// a row cells warm-start along eps.
PhaseDiagram phase_diagram(const std::vector<double>& alpha_grid,
                           const std::vector<double>& eps_grid, const ProblemConfig& cfg_base,
                           double rA, double rB, const SolverSettings& settings = {},
                           const TuneSettings& ts = {}, unsigned threads = 0);

struct AlphaSweepRow {
  double alpha = 0;
  double r = 0;
  double lambda_star = 0;
  ErrorReport report;
  bool ok = false;
};

// One warm-started chain over alpha per r value; chains run in parallel.
std::vector<AlphaSweepRow> alpha_sweep(const ProblemConfig& cfg_base,
                                       const std::vector<double>& alphas,
                                       const std::vector<double>& r_values, bool tune,
                                       const SolverSettings& settings = {},
                                       const TuneSettings& ts = {}, unsigned threads = 0);

}  // namespace rerm

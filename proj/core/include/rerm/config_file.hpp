#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rerm/model.hpp"
#include "rerm/prior_mahalanobis.hpp"
#include "rerm/simulator.hpp"
#include "rerm/solver.hpp"

namespace rerm {

struct SweepSpec {
  std::vector<double> alphas{0.5, 1.0, 2.0};
  std::vector<double> eps{0.0, 0.05, 0.1, 0.2, 0.4, 0.8};
  std::vector<double> r_values{1.0, 2.0};
  double r_min = 1.0, r_max = 3.0;
  int r_points = 50;
  bool tune = true;
  double rA = 2.0, rB = 1.0;  // phase diagram reports E_rob(rA) - E_rob(rB)
  unsigned threads = 0;
};

struct ScalingSpec {
  double alpha_min = 1e-4, alpha_max = 1e-2;
  int points = 9;
  double fit_fraction = 0.5;
  double tol = 0.05;
};

struct RadSpec {
  int n = 100;
  int d = 100;
  double max_dual_x = 1.0, W = 1.0, sigma_sc = 1.0, sup_dual_w = 1.0;
  double max_x2 = 1.0, W2 = 1.0, lambda_min = 1.0;
  double max_x_Ainv = 1.0, WA = 1.0;
  std::vector<double> lambda_alpha{1.0};
  double clean = 0.0, r_norm = 2.0;
};

struct SwfmSpec {
  SwfmTable table;
  std::vector<double> w{1.0, 1.0};
  std::string case_name;  // empty: use w
};

// Everything a CLI run needs, with every field defaulted.
struct RunConfig {
  ProblemConfig problem;
  SolverSettings solver;
  TuneSettings tune;
  ComparisonSettings sim;
  bool sim_tune = true;  // simulate at the theory-tuned lambda
  SweepSpec sweep;
  ScalingSpec scaling;
  RadSpec rad;
  SwfmSpec swfm;
};

// Flat "key = value" text. '#' starts a comment, "[section]" prefixes the
// following keys with "section.". Values: numbers, inf, true/false, bare or
// quoted strings, and [a, b, ...] number lists. Unknown keys are errors.
// Overrides are "key=value" strings applied after the text and may replace
// keys it set. Throws ConfigError; the result has passed validate_config.
RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

// Resolved configuration, one "key = value" line per known key, in a fixed
// order. parse_config(echo_config(c)) reproduces c.
std::string echo_config(const RunConfig& cfg);

// FNV-1a of echo_config, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

}  // namespace rerm

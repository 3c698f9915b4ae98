#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rerm::cli {

enum ExitCode : int { ok = 0, config_error = 1, not_converged = 2, io_error = 3 };

struct RunOptions {
  std::vector<std::string> overrides;  // "key=value", applied after the file
  bool tune = false;                   // solve: tune lambda first
  bool plots = true;                   // also write SVG plots
};

// Subcommands: solve, alpha-sweep, r-sweep, phase-diagram, maha-compare,
// scaling, simulate, rad-bounds. An empty config_path runs on defaults.
// Progress and errors go to `log`.
int run(const std::string& subcommand, const std::string& config_path,
        const std::string& output_dir, const RunOptions& opts, std::ostream& log);

const std::vector<std::string>& subcommands();
std::string usage();

// argv front end.
int main(int argc, char** argv);

}  // namespace rerm::cli

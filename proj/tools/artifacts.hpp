#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace rerm::cli {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Run metadata written at the top of every artifact.
struct Metadata {
  std::string version;
  std::string subcommand;
  std::string config_echo;  // one "key = value" per line
  std::string config_hash;
  double wall_seconds = 0;

  std::vector<std::string> lines() const;
};

// 12 significant digits; nan and inf spelled out.
std::string format_number(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);
  CsvTable& row(std::vector<std::string> cells);
  // Body only: column line and rows.
  std::string body() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

// Metadata as "# " lines followed by the body.
void write_csv(const std::filesystem::path& path, const Metadata& meta, const CsvTable& table);
void write_text(const std::filesystem::path& path, const std::string& text);

struct Series {
  std::string name;
  std::vector<double> x, y;
};

struct PlotSpec {
  std::string title, xlabel, ylabel;
  bool log_x = false, log_y = false;
};

// Standalone SVG documents; metadata goes into a leading comment.
std::string svg_line_plot(const std::vector<Series>& series, const PlotSpec& spec,
                          const Metadata& meta);
// z[i][j] at (x[i], y[j]); a diverging scale centred on zero.
std::string svg_heat_map(const std::vector<double>& x, const std::vector<double>& y,
                         const std::vector<std::vector<double>>& z, const PlotSpec& spec,
                         const Metadata& meta);

}  // namespace rerm::cli

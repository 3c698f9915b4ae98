#include "artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rerm::cli {

std::vector<std::string> Metadata::lines() const {
  std::vector<std::string> out{"rerm " + version, "subcommand: " + subcommand,
                               "config_hash: " + config_hash,
                               "wall_time_s: " + format_number(wall_seconds)};
  std::istringstream in(config_echo);
  std::string l;
  while (std::getline(in, l)) out.push_back("config: " + l);
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

CsvTable& CsvTable::row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) throw std::logic_error("csv row width mismatch");
  rows_.push_back(std::move(cells));
  return *this;
}

std::string CsvTable::body() const {
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s + "\n";
  };
  std::string out = join(columns_);
  for (const auto& r : rows_) out += join(r);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("write to '" + path.string() + "' failed");
}

void write_csv(const std::filesystem::path& path, const Metadata& meta, const CsvTable& table) {
  std::string text;
  for (const auto& l : meta.lines()) text += "# " + l + "\n";
  write_text(path, text + table.body());
}

namespace {

constexpr double kW = 640, kH = 440, kL = 70, kR = 150, kT = 40, kB = 55;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                         "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

std::string header(const Metadata& meta) {
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!--\n";
  for (auto l : meta.lines()) {
    // "--" may not appear inside an XML comment
    for (std::size_t p; (p = l.find("--")) != std::string::npos;) l.replace(p, 2, "- -");
    s += l + "\n";
  }
  s += "-->\n";
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
                "font-family=\"sans-serif\" font-size=\"12\">\n",
                kW, kH);
  return s + buf + "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;
  double map(double v, double a, double b) const {
    double t = log ? (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo))
                   : (v - lo) / (hi - lo);
    return a + t * (b - a);
  }
};

Axis make_axis(const std::vector<double>& vals, bool log) {
  Axis ax;
  ax.log = log;
  double lo = INFINITY, hi = -INFINITY;
  for (double v : vals) {
    if (!std::isfinite(v) || (log && v <= 0)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!std::isfinite(lo)) lo = log ? 1 : 0, hi = log ? 10 : 1;
  if (hi == lo) {
    if (log) lo /= 2, hi *= 2;
    else lo -= 0.5, hi += 0.5;
  }
  ax.lo = lo;
  ax.hi = hi;
  return ax;
}

std::string text(double x, double y, const std::string& s, const char* anchor = "middle",
                 double rotate = 0) {
  char buf[96];
  if (rotate != 0)
    std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"%s\" transform=\"rotate(%g %.2f %.2f)\">",
                  x, y, anchor, rotate, x, y);
  else
    std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"%s\">", x, y, anchor);
  return buf + escape(s) + "</text>\n";
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string frame(const PlotSpec& spec, const Axis& xa, const Axis& ya) {
  const double x0 = kL, x1 = kW - kR, y0 = kH - kB, y1 = kT;
  char buf[200];
  std::string s;
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n",
                x0, y1, x1 - x0, y0 - y1);
  s += buf;
  for (int i = 0; i <= 4; ++i) {
    double t = i / 4.0;
    double xv = xa.log ? std::pow(10.0, std::log10(xa.lo) + t * (std::log10(xa.hi) - std::log10(xa.lo)))
                       : xa.lo + t * (xa.hi - xa.lo);
    double yv = ya.log ? std::pow(10.0, std::log10(ya.lo) + t * (std::log10(ya.hi) - std::log10(ya.lo)))
                       : ya.lo + t * (ya.hi - ya.lo);
    double px = x0 + t * (x1 - x0), py = y0 + t * (y1 - y0);
    std::snprintf(buf, sizeof buf, "<line x1=\"%.2f\" y1=\"%g\" x2=\"%.2f\" y2=\"%g\" stroke=\"black\"/>\n",
                  px, y0, px, y0 + 5);
    s += buf;
    s += text(px, y0 + 18, tick_label(xv));
    std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%.2f\" x2=\"%g\" y2=\"%.2f\" stroke=\"black\"/>\n",
                  x0 - 5, py, x0, py);
    s += buf;
    s += text(x0 - 8, py + 4, tick_label(yv), "end");
  }
  s += text((x0 + x1) / 2, kT - 15, spec.title);
  s += text((x0 + x1) / 2, kH - 15, spec.xlabel);
  s += text(18, (y0 + y1) / 2, spec.ylabel, "middle", -90);
  return s;
}

}  // namespace

std::string svg_line_plot(const std::vector<Series>& series, const PlotSpec& spec,
                          const Metadata& meta) {
  std::vector<double> xs, ys;
  for (const auto& s : series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
  }
  Axis xa = make_axis(xs, spec.log_x), ya = make_axis(ys, spec.log_y);
  const double x0 = kL, x1 = kW - kR, y0 = kH - kB, y1 = kT;
  std::string out = header(meta) + frame(spec, xa, ya);
  char buf[200];
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      bool ok = std::isfinite(s.x[i]) && std::isfinite(s.y[i]) && !(spec.log_x && s.x[i] <= 0) &&
                !(spec.log_y && s.y[i] <= 0);
      if (!ok) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", xa.map(s.x[i], x0, x1), ya.map(s.y[i], y0, y1));
      pts += buf;
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2.5\" fill=\"%s\"/>\n",
                    xa.map(s.x[i], x0, x1), ya.map(s.y[i], y0, y1), color);
      out += buf;
    }
    out += "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" + std::string(color) +
           "\" points=\"" + pts + "\"/>\n";
    double ly = kT + 15 + 18 * static_cast<double>(k);
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"%s\" stroke-width=\"2\"/>\n",
                  x1 + 10, ly - 4, x1 + 30, ly - 4, color);
    out += buf;
    out += text(x1 + 35, ly, s.name, "start");
  }
  return out + "</svg>\n";
}

std::string svg_heat_map(const std::vector<double>& x, const std::vector<double>& y,
                         const std::vector<std::vector<double>>& z, const PlotSpec& spec,
                         const Metadata& meta) {
  double zmax = 0;
  for (const auto& row : z)
    for (double v : row)
      if (std::isfinite(v)) zmax = std::max(zmax, std::abs(v));
  if (zmax == 0) zmax = 1;
  // Cells are drawn on index axes; tick labels give the grid values.
  const double x0 = kL, x1 = kW - kR, y0 = kH - kB, y1 = kT;
  const double cw = (x1 - x0) / std::max<std::size_t>(x.size(), 1);
  const double ch = (y0 - y1) / std::max<std::size_t>(y.size(), 1);
  std::string out = header(meta);
  char buf[240];
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      double v = (i < z.size() && j < z[i].size()) ? z[i][j] : NAN;
      int r = 200, g = 200, b = 200;
      if (std::isfinite(v)) {
        double t = std::clamp(v / zmax, -1.0, 1.0);
        // negative: green, positive: red
        if (t < 0) r = b = static_cast<int>(255 * (1 + t)), g = 255 - static_cast<int>(80 * -t);
        else g = b = static_cast<int>(255 * (1 - t)), r = 255 - static_cast<int>(40 * t);
      }
      std::snprintf(buf, sizeof buf,
                    "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"rgb(%d,%d,%d)\" "
                    "stroke=\"white\"><title>%s</title></rect>\n",
                    x0 + cw * i, y0 - ch * (j + 1), cw, ch, r, g, b, format_number(v).c_str());
      out += buf;
    }
  }
  for (std::size_t i = 0; i < x.size(); ++i) out += text(x0 + cw * (i + 0.5), y0 + 18, tick_label(x[i]));
  for (std::size_t j = 0; j < y.size(); ++j) out += text(x0 - 8, y0 - ch * (j + 0.5) + 4, tick_label(y[j]), "end");
  out += text((x0 + x1) / 2, kT - 15, spec.title);
  out += text((x0 + x1) / 2, kH - 15, spec.xlabel);
  out += text(18, (y0 + y1) / 2, spec.ylabel, "middle", -90);
  out += text(x1 + 10, kT + 15, "max |z| = " + tick_label(zmax), "start");
  return out + "</svg>\n";
}

}  // namespace rerm::cli

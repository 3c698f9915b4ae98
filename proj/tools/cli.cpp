#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "artifacts.hpp"
#include "rerm/config_file.hpp"
#include "rerm/metrics.hpp"
#include "rerm/parallel.hpp"
#include "rerm/prior_mahalanobis.hpp"
#include "rerm/scaling.hpp"
#include "rerm/simulator.hpp"
#include "rerm/solver.hpp"

#ifndef RERM_VERSION
#define RERM_VERSION "unknown"
#endif

namespace rerm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

struct Context {
  RunConfig cfg;
  fs::path out;
  RunOptions opts;
  std::ostream& log;
  Metadata meta;
  Clock::time_point start;

  // Metadata stamped with the elapsed time so far.
  const Metadata& stamp() {
    meta.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return meta;
  }
  void csv(const std::string& name, const CsvTable& t) {
    write_csv(out / name, stamp(), t);
    log << "wrote " << (out / name).string() << "\n";
  }
  void svg(const std::string& name, const std::string& doc) {
    if (!opts.plots) return;
    write_text(out / name, doc);
    log << "wrote " << (out / name).string() << "\n";
  }
  void json_file(const std::string& name, json body) {
    json m;
    m["version"] = meta.version;
    m["subcommand"] = meta.subcommand;
    m["config_hash"] = meta.config_hash;
    m["wall_time_s"] = stamp().wall_seconds;
    json c = json::object();
    for (const auto& l : meta.lines())
      if (l.rfind("config: ", 0) == 0) {
        std::string kv = l.substr(8);
        auto eq = kv.find(" = ");
        c[kv.substr(0, eq)] = kv.substr(eq + 3);
      }
    m["config"] = c;
    body["metadata"] = m;
    write_text(out / name, body.dump(2) + "\n");
    log << "wrote " << (out / name).string() << "\n";
  }
  unsigned threads() const { return cfg.sweep.threads; }
};

std::string num(double v) { return format_number(v); }

// NaN as JSON null.
json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json report_json(const ErrorReport& r) {
  return {{"e_gen", jnum(r.e_gen)}, {"e_bnd", jnum(r.e_bnd)}, {"e_rob", jnum(r.e_rob)},
          {"teacher_margin", jnum(r.teacher_margin)}};
}

json overlaps_json(const Overlaps& o) {
  return {{"m", jnum(o.m)}, {"q", jnum(o.q)}, {"V", jnum(o.V)}, {"P", jnum(o.P)}};
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const ErrorReport kNaNReport{kNaN, kNaN, kNaN, kNaN};

std::vector<double> linear_grid(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  g.back() = hi;
  return g;
}

int cmd_solve(Context& ctx) {
  const auto& c = ctx.cfg;
  SolveResult r;
  double lambda = c.problem.lambda;
  if (ctx.opts.tune) {
    TuneResult t = tune_lambda(c.problem, c.solver, c.tune);
    r = t.solve;
    lambda = t.lambda_star;
    r.converged = t.ok && t.solve.converged;
  } else {
    r = solve_fixed_point(c.problem, c.solver);
  }
  ProblemConfig at = c.problem;
  at.lambda = lambda;
  json body;
  body["lambda"] = lambda;
  body["tuned"] = ctx.opts.tune;
  body["converged"] = r.converged;
  body["iterations"] = r.iterations;
  body["residual"] = jnum(r.residual);
  body["final_mu"] = jnum(r.final_mu);
  body["overlaps"] = overlaps_json(r.overlaps);
  body["hats"] = {{"mhat", jnum(r.hats.mhat)}, {"qhat", jnum(r.hats.qhat)},
                  {"Vhat", jnum(r.hats.Vhat)}, {"Phat", jnum(r.hats.Phat)}};
  body["report"] = r.converged ? report_json(error_report(r.overlaps, at)) : report_json(kNaNReport);
  ctx.json_file("solve.json", body);
  if (!r.converged) {
    ctx.log << "error: saddle-point iteration did not converge after " << r.iterations
            << " iterations (residual " << r.residual << ")\n";
    return not_converged;
  }
  return ok;
}

int cmd_alpha_sweep(Context& ctx) {
  const auto& c = ctx.cfg;
  auto rows = alpha_sweep(c.problem, c.sweep.alphas, c.sweep.r_values, c.sweep.tune, c.solver,
                          c.tune, ctx.threads());
  CsvTable t({"alpha", "r", "lambda_star", "e_gen", "e_bnd", "e_rob"});
  std::map<double, Series> by_r;
  std::size_t failed = 0;
  for (const auto& row : rows) {
    const ErrorReport& e = row.ok ? row.report : kNaNReport;
    failed += !row.ok;
    t.row({num(row.alpha), num(row.r), num(row.ok ? row.lambda_star : kNaN), num(e.e_gen),
           num(e.e_bnd), num(e.e_rob)});
    auto& s = by_r[row.r];
    s.name = "r = " + num(row.r);
    s.x.push_back(row.alpha);
    s.y.push_back(e.e_rob);
  }
  ctx.csv("alpha_sweep.csv", t);
  std::vector<Series> series;
  for (auto& [r, s] : by_r) series.push_back(s);
  ctx.svg("alpha_sweep.svg", svg_line_plot(series, {"robust error", "alpha", "E_rob", true, false},
                                           ctx.stamp()));
  if (failed) ctx.log << "warning: " << failed << " cells did not converge (nan rows)\n";
  return ok;
}

int cmd_r_sweep(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto grid = linear_grid(c.sweep.r_min, c.sweep.r_max, c.sweep.r_points);
  std::vector<RSweepResult> res(c.sweep.eps.size());
  parallel_for(
      res.size(),
      [&](std::size_t i) {
        ProblemConfig p = c.problem;
        p.eps = c.sweep.eps[i];
        res[i] = sweep_regularization_order(p, grid, c.sweep.tune, c.solver, c.tune);
      },
      ctx.threads());
  CsvTable t({"eps", "r", "lambda_star", "e_rob", "is_argmin"});
  CsvTable star({"eps", "r_star"});
  Series s{"r_star", {}, {}};
  for (std::size_t i = 0; i < res.size(); ++i) {
    const double eps = c.sweep.eps[i];
    for (const auto& pt : res[i].points) {
      bool arg = res[i].r_star && pt.ok && pt.r == *res[i].r_star;
      t.row({num(eps), num(pt.r), num(pt.ok ? pt.lambda_star : kNaN),
             num(pt.ok ? pt.report.e_rob : kNaN), arg ? "1" : "0"});
    }
    double rs = res[i].r_star.value_or(kNaN);
    star.row({num(eps), num(rs)});
    s.x.push_back(eps);
    s.y.push_back(rs);
    if (res[i].failed) ctx.log << "warning: eps = " << eps << ": " << res[i].failed << " r values did not converge\n";
  }
  ctx.csv("r_sweep.csv", t);
  ctx.csv("r_star.csv", star);
  ctx.svg("r_star.svg", svg_line_plot({s}, {"optimal regularization order", "eps", "r_star"}, ctx.stamp()));
  return ok;
}

int cmd_phase_diagram(Context& ctx) {
  const auto& c = ctx.cfg;
  PhaseDiagram pd = phase_diagram(c.sweep.alphas, c.sweep.eps, c.problem, c.sweep.rA, c.sweep.rB,
                                  c.solver, c.tune, ctx.threads());
  CsvTable t({"alpha", "eps", "delta_e_rob"});
  for (std::size_t i = 0; i < pd.alphas.size(); ++i)
    for (std::size_t j = 0; j < pd.eps.size(); ++j) t.row({num(pd.alphas[i]), num(pd.eps[j]), num(pd.delta[i][j])});
  ctx.csv("phase_diagram.csv", t);
  std::string title = "E_rob(r=" + num(c.sweep.rA) + ") - E_rob(r=" + num(c.sweep.rB) + ")";
  ctx.svg("phase_diagram.svg", svg_heat_map(pd.alphas, pd.eps, pd.delta, {title, "alpha", "eps"}, ctx.stamp()));
  if (pd.failed) ctx.log << "warning: " << pd.failed << " cells did not converge (nan)\n";
  return ok;
}

int cmd_maha_compare(Context& ctx) {
  const auto& c = ctx.cfg;
  const SwfmCase cases[] = {SwfmCase::w_equals_delta, SwfmCase::l2, SwfmCase::w_equals_delta_inverse};
  const std::size_t ne = c.sweep.eps.size();
  struct Cell {
    double lambda = kNaN;
    ErrorReport report = kNaNReport;
  };
  std::vector<Cell> cells(ne * 3);
  parallel_for(
      cells.size(),
      [&](std::size_t k) {
        ProblemConfig p = c.problem;
        p.geometry = Geometry::mahalanobis;
        p.eps = c.sweep.eps[k / 3];
        p.measure = swfm_case_measure(c.swfm.table, cases[k % 3]);
        p = validate_config(p);
        if (c.sweep.tune) {
          TuneResult tr = tune_lambda(p, c.solver, c.tune);
          if (tr.ok) cells[k] = {tr.lambda_star, tr.report};
        } else {
          SolveResult r = solve_fixed_point(p, c.solver);
          if (r.converged) cells[k] = {p.lambda, error_report(r.overlaps, p)};
        }
      },
      ctx.threads());
  CsvTable t({"eps", "case", "lambda_star", "e_gen", "e_bnd", "e_rob"});
  std::vector<Series> series(3);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto& e = cells[k].report;
    t.row({num(c.sweep.eps[k / 3]), to_string(cases[k % 3]), num(cells[k].lambda), num(e.e_gen),
           num(e.e_bnd), num(e.e_rob)});
    series[k % 3].name = to_string(cases[k % 3]);
    series[k % 3].x.push_back(c.sweep.eps[k / 3]);
    series[k % 3].y.push_back(e.e_rob);
  }
  ctx.csv("maha_compare.csv", t);
  ctx.svg("maha_compare.svg", svg_line_plot(series, {"robust error, alpha = " + num(c.problem.alpha),
                                                     "eps", "E_rob"}, ctx.stamp()));
  return ok;
}

int cmd_scaling(Context& ctx) {
  const auto& c = ctx.cfg;
  auto grid = geometric_grid(c.scaling.alpha_min, c.scaling.alpha_max, c.scaling.points);
  ScalingFit fit = fit_scaling_exponents(c.problem, grid, {c.scaling.fit_fraction, c.solver});
  CsvTable t({"alpha", "m", "q", "V", "P"});
  Series sm{"m", {}, {}}, sq{"q", {}, {}}, sv{"V", {}, {}}, sp{"P", {}, {}};
  json pts = json::array();
  for (const auto& p : fit.points) {
    if (!p.converged) continue;
    t.row({num(p.alpha), num(p.overlaps.m), num(p.overlaps.q), num(p.overlaps.V), num(p.overlaps.P)});
    for (auto* s : {&sm, &sq, &sv, &sp}) s->x.push_back(p.alpha);
    sm.y.push_back(p.overlaps.m);
    sq.y.push_back(p.overlaps.q);
    sv.y.push_back(p.overlaps.V);
    sp.y.push_back(p.overlaps.P);
    pts.push_back({{"alpha", p.alpha}, {"report", report_json(p.report)}});
  }
  ctx.csv("scaling.csv", t);
  ctx.svg("scaling.svg", svg_line_plot({sm, sq, sv, sp}, {"overlaps", "alpha", "value", true, true}, ctx.stamp()));

  json body;
  body["complete"] = fit.complete;
  body["points"] = pts;
  if (fit.complete) {
    auto pf = [](const PowerFit& f) { return json{{"exponent", f.slope}, {"log_prefactor", f.intercept}, {"r2", f.r2}}; };
    body["n_fit"] = fit.n_fit;
    body["exponents"] = {{"m", pf(fit.m)}, {"q", pf(fit.q)}, {"V", pf(fit.V)}, {"P", pf(fit.P)}};
    body["min_r2"] = fit.min_r2();
    LeadingOrder lo = leading_order_errors(fit, c.problem, c.scaling.tol);
    body["leading_order"] = {{"gen_coeff", lo.gen_coeff},         {"gen_exponent", lo.gen_exponent},
                             {"bnd_coeff", lo.bnd_coeff},         {"bnd_exponent", lo.bnd_exponent},
                             {"bnd2_coeff", lo.bnd2_coeff},       {"bnd2_exponent", lo.bnd2_exponent},
                             {"boundary_regime", to_string(lo.regime)}};
  }
  ctx.json_file("scaling.json", body);
  if (!fit.complete) {
    ctx.log << "error: solver failed at alpha = " << fit.points.back().alpha << "; partial results written\n";
    return not_converged;
  }
  if (fit.min_r2() < 0.99) ctx.log << "warning: fit R^2 " << fit.min_r2() << " below 0.99\n";
  return ok;
}

int cmd_simulate(Context& ctx) {
  auto& c = ctx.cfg;
  ProblemConfig p = c.problem;
  if (c.sim_tune) {
    TuneResult tr = tune_lambda(p, c.solver, c.tune);
    if (!tr.ok) {
      ctx.log << "error: lambda tuning found no converged point\n";
      return not_converged;
    }
    p.lambda = tr.lambda_star;
    ctx.log << "tuned lambda = " << p.lambda << "\n";
  }
  ComparisonSettings s = c.sim;
  s.solver = c.solver;
  s.threads = ctx.threads();
  Comparison cmp = compare_theory_simulation(p, s);
  CsvTable t({"config_hash", "seed", "m", "q", "P", "e_gen", "e_bnd", "e_rob"});
  const std::string& h = ctx.meta.config_hash;
  for (const auto& r : cmp.rows)
    t.row({h, std::to_string(r.seed), num(r.overlaps.m), num(r.overlaps.q), num(r.overlaps.P),
           num(r.report.e_gen), num(r.report.e_bnd), num(r.report.e_rob)});
  t.row({h, "mean", "", "", "", num(cmp.mean.e_gen), num(cmp.mean.e_bnd), num(cmp.mean.e_rob)});
  t.row({h, "std_error", "", "", "", num(cmp.std_error.e_gen), num(cmp.std_error.e_bnd), num(cmp.std_error.e_rob)});
  t.row({h, "theory", num(cmp.theory_overlaps.m), num(cmp.theory_overlaps.q), num(cmp.theory_overlaps.P),
         num(cmp.theory.e_gen), num(cmp.theory.e_bnd), num(cmp.theory.e_rob)});
  ctx.csv("simulate.csv", t);
  ctx.log << "lambda = " << p.lambda << ", eps_finite = " << cmp.eps_finite << "\n"
          << "theory within 3 SE: e_gen " << cmp.agree_gen << ", e_bnd " << cmp.agree_bnd
          << ", e_rob " << cmp.agree_rob << "\n";
  if (!cmp.theory_converged) {
    ctx.log << "error: theory side did not converge\n";
    return not_converged;
  }
  return ok;
}

int cmd_rad_bounds(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto& r = c.rad;
  const double eps = c.problem.eps;
  CsvTable t({"bound", "value"});
  t.row({"generic", num(rad_bound_generic(r.max_dual_x, r.W, r.sigma_sc, r.n, eps, r.sup_dual_w))});
  t.row({"l2_mahalanobis", num(rad_bound_l2_maha(r.max_x2, r.W2, r.n, eps, r.lambda_min))});
  t.row({"commuting", num(rad_bound_commuting(r.max_x_Ainv, r.WA, r.n, eps, r.lambda_alpha))});
  t.row({"lp", num(rad_bound_lp(r.clean, eps, r.d, c.problem.norms.p, r.r_norm, r.n))});
  ctx.csv("rad_bounds.csv", t);
  return ok;
}

using Command = int (*)(Context&);

const std::vector<std::pair<std::string, Command>>& table() {
  static const std::vector<std::pair<std::string, Command>> t{
      {"solve", cmd_solve},           {"alpha-sweep", cmd_alpha_sweep},
      {"r-sweep", cmd_r_sweep},       {"phase-diagram", cmd_phase_diagram},
      {"maha-compare", cmd_maha_compare}, {"scaling", cmd_scaling},
      {"simulate", cmd_simulate},     {"rad-bounds", cmd_rad_bounds}};
  return t;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [n, f] : table()) v.push_back(n);
    return v;
  }();
  return names;
}

std::string usage() {
  std::string s =
      "usage: rerm <subcommand> [-c CONFIG] [-o OUTDIR] [--set key=value ...] [--tune] [--no-plots]\n"
      "subcommands:";
  for (const auto& n : subcommands()) s += " " + n;
  return s + "\n";
}

int run(const std::string& subcommand, const std::string& config_path, const std::string& output_dir,
        const RunOptions& opts, std::ostream& log) {
  Command cmd = nullptr;
  for (const auto& [n, f] : table())
    if (n == subcommand) cmd = f;
  if (!cmd) {
    log << "error: unknown subcommand '" << subcommand << "'\n" << usage();
    return config_error;
  }
  std::optional<RunConfig> cfg;
  try {
    cfg = config_path.empty() ? parse_config("", opts.overrides) : load_config(config_path, opts.overrides);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return config_error;
  }
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec || !fs::is_directory(output_dir)) {
    log << "I/O error: cannot create output directory '" << output_dir << "'\n";
    return io_error;
  }
  Context ctx{*cfg, fs::path(output_dir), opts, log, {}, Clock::now()};
  ctx.meta.version = RERM_VERSION;
  ctx.meta.subcommand = subcommand;
  ctx.meta.config_echo = echo_config(*cfg);
  ctx.meta.config_hash = config_hash(*cfg);
  try {
    return cmd(ctx);
  } catch (const IoError& e) {
    log << "I/O error: " << e.what() << "\n";
    return io_error;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const std::domain_error& e) {
    log << "error: " << e.what() << "\n";
    return not_converged;
  }
}

int main(int argc, char** argv) {
  if (argc > 1 && argv[1][0] != '-') {
    bool known = false;
    for (const auto& n : subcommands()) known = known || n == argv[1];
    if (!known) {
      std::cerr << "error: unknown subcommand '" << argv[1] << "'\n" << usage();
      return config_error;
    }
  }
  CLI::App app{"Asymptotic theory and simulation of adversarially robust linear classification"};
  app.set_version_flag("--version", std::string("rerm ") + RERM_VERSION);
  app.require_subcommand(1);
  std::string config, out = ".";
  RunOptions opts;
  for (const auto& name : subcommands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", config, "Config file (key = value)");
    sub->add_option("-o,--out", out, "Output directory")->capture_default_str();
    sub->add_option("--set", opts.overrides, "Override a config key, e.g. --set alpha=0.5");
    sub->add_flag("--no-plots", [&](std::int64_t) { opts.plots = false; }, "Skip SVG plots");
    if (name == "solve") sub->add_flag("--tune", opts.tune, "Tune lambda before solving");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n" << usage();
    return config_error;
  }
  return run(app.get_subcommands().front()->get_name(), config, out, opts, std::cerr);
}

}  // namespace rerm::cli

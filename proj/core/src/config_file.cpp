#include "rerm/config_file.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace rerm {

namespace {

struct Value {
  std::string scalar;
  std::vector<std::string> items;
  bool is_list = false;
};

std::string trim(std::string_view s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + "]";
}

double to_double(const std::string& key, const std::string& raw) {
  std::string s = unquote(raw);
  if (s == "inf" || s == "+inf") return kInf;
  double v = 0;
  const char* b = s.data();
  const char* e = b + s.size();
  if (!s.empty() && *b == '+') ++b;
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e)
    throw ConfigError("key '" + key + "': expected a number, got '" + raw + "'");
  return v;
}

double as_double(const std::string& key, const Value& v) {
  if (v.is_list) throw ConfigError("key '" + key + "' expects a number");
  return to_double(key, v.scalar);
}

long as_int(const std::string& key, const Value& v) {
  double x = as_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 9e15)
    throw ConfigError("key '" + key + "' expects an integer");
  return static_cast<long>(x);
}

bool as_bool(const std::string& key, const Value& v) {
  std::string s = unquote(v.scalar);
  if (!v.is_list && s == "true") return true;
  if (!v.is_list && s == "false") return false;
  throw ConfigError("key '" + key + "' expects true or false");
}

std::string as_string(const std::string& key, const Value& v) {
  if (v.is_list) throw ConfigError("key '" + key + "' expects a string");
  return unquote(v.scalar);
}

std::vector<double> as_list(const std::string& key, const Value& v) {
  if (!v.is_list) throw ConfigError("key '" + key + "' expects a list like [1, 2]");
  std::vector<double> out;
  for (const auto& it : v.items) out.push_back(to_double(key, it));
  return out;
}

struct Field {
  const char* name;
  std::function<void(RunConfig&, const std::string&, const Value&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field number(const char* name, T RunConfig::*outer, double T::*member) {
  return {name,
          [=](RunConfig& c, const std::string& k, const Value& v) { (c.*outer).*member = as_double(k, v); },
          [=](const RunConfig& c) { return fmt((c.*outer).*member); }};
}

template <class T, class I>
Field integer(const char* name, T RunConfig::*outer, I T::*member) {
  return {name,
          [=](RunConfig& c, const std::string& k, const Value& v) {
            long x = as_int(k, v);
            if (x < 0) throw ConfigError("key '" + k + "' must be nonnegative");
            (c.*outer).*member = static_cast<I>(x);
          },
          [=](const RunConfig& c) { return std::to_string((c.*outer).*member); }};
}

template <class T>
Field list(const char* name, T RunConfig::*outer, std::vector<double> T::*member) {
  return {name,
          [=](RunConfig& c, const std::string& k, const Value& v) { (c.*outer).*member = as_list(k, v); },
          [=](const RunConfig& c) { return fmt((c.*outer).*member); }};
}

template <class T>
Field boolean(const char* name, T RunConfig::*outer, bool T::*member) {
  return {name,
          [=](RunConfig& c, const std::string& k, const Value& v) { (c.*outer).*member = as_bool(k, v); },
          [=](const RunConfig& c) { return std::string((c.*outer).*member ? "true" : "false"); }};
}

const char* quadrature_name(Quadrature q) { return q == Quadrature::panels ? "panels" : "gauss_hermite"; }
const char* optimizer_name(Optimizer o) {
  switch (o) {
    case Optimizer::automatic: return "automatic";
    case Optimizer::subgradient: return "subgradient";
    case Optimizer::accelerated: return "accelerated";
  }
  return "";
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = [] {
    using P = ProblemConfig;
    std::vector<Field> v;
    v.push_back(number("alpha", &RunConfig::problem, &P::alpha));
    v.push_back(number("eps", &RunConfig::problem, &P::eps));
    v.push_back(number("lambda", &RunConfig::problem, &P::lambda));
    v.push_back({"p",
                 [](RunConfig& c, const std::string& k, const Value& x) { c.problem.norms.p = as_double(k, x); },
                 [](const RunConfig& c) { return fmt(c.problem.norms.p); }});
    v.push_back({"r",
                 [](RunConfig& c, const std::string& k, const Value& x) { c.problem.norms.r = as_double(k, x); },
                 [](const RunConfig& c) { return fmt(c.problem.norms.r); }});
    v.push_back({"loss",
                 [](RunConfig& c, const std::string& k, const Value& x) { c.problem.loss = parse_loss(as_string(k, x)); },
                 [](const RunConfig& c) { return to_string(c.problem.loss); }});
    v.push_back({"geometry",
                 [](RunConfig& c, const std::string& k, const Value& x) {
                   c.problem.geometry = parse_geometry(as_string(k, x));
                 },
                 [](const RunConfig& c) { return to_string(c.problem.geometry); }});
    v.push_back({"channel",
                 [](RunConfig& c, const std::string& k, const Value& x) {
                   std::string s = as_string(k, x);
                   if (s == "probit") c.problem.channel.kind = ChannelSpec::Kind::probit;
                   else if (s == "noisy_sign") c.problem.channel.kind = ChannelSpec::Kind::noisy_sign;
                   else throw ConfigError("unknown channel '" + s + "'");
                 },
                 [](const RunConfig& c) { return to_string(c.problem.channel.kind); }});
    // tau for probit, label-noise variance for noisy_sign
    v.push_back({"tau",
                 [](RunConfig& c, const std::string& k, const Value& x) { c.problem.channel.noise = as_double(k, x); },
                 [](const RunConfig& c) { return fmt(c.problem.channel.noise); }});
    v.push_back({"prior",
                 [](RunConfig& c, const std::string& k, const Value& x) {
                   std::string s = as_string(k, x);
                   if (s == "gaussian") c.problem.prior.kind = PriorSpec::Kind::gaussian;
                   else if (s == "sparse_binary") c.problem.prior.kind = PriorSpec::Kind::sparse_binary;
                   else throw ConfigError("unknown prior '" + s + "'");
                 },
                 [](const RunConfig& c) { return to_string(c.problem.prior.kind); }});
    v.push_back({"rho",
                 [](RunConfig& c, const std::string& k, const Value& x) { c.problem.prior.rho = as_double(k, x); },
                 [](const RunConfig& c) { return fmt(c.problem.prior.rho); }});

    v.push_back({"swfm.phi",
                 [](RunConfig& c, const std::string& k, const Value& x) { c.swfm.table.phi = as_list(k, x); },
                 [](const RunConfig& c) { return fmt(c.swfm.table.phi); }});
    v.push_back({"swfm.omega",
                 [](RunConfig& c, const std::string& k, const Value& x) { c.swfm.table.omega = as_list(k, x); },
                 [](const RunConfig& c) { return fmt(c.swfm.table.omega); }});
    v.push_back({"swfm.delta",
                 [](RunConfig& c, const std::string& k, const Value& x) { c.swfm.table.delta = as_list(k, x); },
                 [](const RunConfig& c) { return fmt(c.swfm.table.delta); }});
    v.push_back({"swfm.theta",
                 [](RunConfig& c, const std::string& k, const Value& x) { c.swfm.table.theta = as_list(k, x); },
                 [](const RunConfig& c) { return fmt(c.swfm.table.theta); }});
    v.push_back(list("swfm.w", &RunConfig::swfm, &SwfmSpec::w));
    v.push_back({"swfm.case",
                 [](RunConfig& c, const std::string& k, const Value& x) {
                   c.swfm.case_name = as_string(k, x);
                   if (!c.swfm.case_name.empty()) parse_swfm_case(c.swfm.case_name);
                 },
                 [](const RunConfig& c) { return "\"" + c.swfm.case_name + "\""; }});

    v.push_back(number("solver.mu", &RunConfig::solver, &SolverSettings::mu));
    v.push_back(number("solver.mu_min", &RunConfig::solver, &SolverSettings::mu_min));
    v.push_back(integer("solver.stall_window", &RunConfig::solver, &SolverSettings::stall_window));
    v.push_back(number("solver.tol", &RunConfig::solver, &SolverSettings::tol));
    v.push_back(integer("solver.max_iters", &RunConfig::solver, &SolverSettings::max_iters));
    v.push_back({"solver.quadrature",
                 [](RunConfig& c, const std::string& k, const Value& x) {
                   std::string s = as_string(k, x);
                   if (s == "panels") c.solver.quadrature = Quadrature::panels;
                   else if (s == "gauss_hermite") c.solver.quadrature = Quadrature::gauss_hermite;
                   else throw ConfigError("unknown quadrature '" + s + "'");
                 },
                 [](const RunConfig& c) { return std::string(quadrature_name(c.solver.quadrature)); }});
    v.push_back(integer("solver.nodes", &RunConfig::solver, &SolverSettings::nodes));
    v.push_back(integer("solver.panel_nodes", &RunConfig::solver, &SolverSettings::panel_nodes));

    v.push_back(number("tune.lo", &RunConfig::tune, &TuneSettings::lo));
    v.push_back(number("tune.hi", &RunConfig::tune, &TuneSettings::hi));
    v.push_back(number("tune.rel_width", &RunConfig::tune, &TuneSettings::rel_width));
    v.push_back({"tune.objective",
                 [](RunConfig& c, const std::string& k, const Value& x) {
                   std::string s = as_string(k, x);
                   if (s == "e_rob") c.tune.objective = Objective::e_rob;
                   else if (s == "e_gen") c.tune.objective = Objective::e_gen;
                   else throw ConfigError("unknown objective '" + s + "'");
                 },
                 [](const RunConfig& c) {
                   return std::string(c.tune.objective == Objective::e_rob ? "e_rob" : "e_gen");
                 }});

    v.push_back(integer("sim.d", &RunConfig::sim, &ComparisonSettings::d));
    v.push_back(integer("sim.seeds", &RunConfig::sim, &ComparisonSettings::seeds));
    v.push_back({"sim.base_seed",
                 [](RunConfig& c, const std::string& k, const Value& x) {
                   long s = as_int(k, x);
                   if (s < 0) throw ConfigError("sim.base_seed must be nonnegative");
                   c.sim.base_seed = static_cast<std::uint64_t>(s);
                 },
                 [](const RunConfig& c) { return std::to_string(c.sim.base_seed); }});
    v.push_back({"sim.optimizer",
                 [](RunConfig& c, const std::string& k, const Value& x) {
                   std::string s = as_string(k, x);
                   if (s == "automatic") c.sim.rerm.method = Optimizer::automatic;
                   else if (s == "subgradient") c.sim.rerm.method = Optimizer::subgradient;
                   else if (s == "accelerated") c.sim.rerm.method = Optimizer::accelerated;
                   else throw ConfigError("unknown optimizer '" + s + "'");
                 },
                 [](const RunConfig& c) { return std::string(optimizer_name(c.sim.rerm.method)); }});
    v.push_back(boolean("sim.test_set", &RunConfig::sim, &ComparisonSettings::use_test_set));
    v.push_back(integer("sim.n_test", &RunConfig::sim, &ComparisonSettings::n_test));
    v.push_back({"sim.tune",
                 [](RunConfig& c, const std::string& k, const Value& x) { c.sim_tune = as_bool(k, x); },
                 [](const RunConfig& c) { return std::string(c.sim_tune ? "true" : "false"); }});

    v.push_back(list("sweep.alphas", &RunConfig::sweep, &SweepSpec::alphas));
    v.push_back(list("sweep.eps", &RunConfig::sweep, &SweepSpec::eps));
    v.push_back(list("sweep.r_values", &RunConfig::sweep, &SweepSpec::r_values));
    v.push_back(number("sweep.r_min", &RunConfig::sweep, &SweepSpec::r_min));
    v.push_back(number("sweep.r_max", &RunConfig::sweep, &SweepSpec::r_max));
    v.push_back(integer("sweep.r_points", &RunConfig::sweep, &SweepSpec::r_points));
    v.push_back(boolean("sweep.tune", &RunConfig::sweep, &SweepSpec::tune));
    v.push_back(number("sweep.rA", &RunConfig::sweep, &SweepSpec::rA));
    v.push_back(number("sweep.rB", &RunConfig::sweep, &SweepSpec::rB));
    v.push_back(integer("sweep.threads", &RunConfig::sweep, &SweepSpec::threads));

    v.push_back(number("scaling.alpha_min", &RunConfig::scaling, &ScalingSpec::alpha_min));
    v.push_back(number("scaling.alpha_max", &RunConfig::scaling, &ScalingSpec::alpha_max));
    v.push_back(integer("scaling.points", &RunConfig::scaling, &ScalingSpec::points));
    v.push_back(number("scaling.fit_fraction", &RunConfig::scaling, &ScalingSpec::fit_fraction));
    v.push_back(number("scaling.tol", &RunConfig::scaling, &ScalingSpec::tol));

    v.push_back(integer("rad.n", &RunConfig::rad, &RadSpec::n));
    v.push_back(integer("rad.d", &RunConfig::rad, &RadSpec::d));
    v.push_back(number("rad.max_dual_x", &RunConfig::rad, &RadSpec::max_dual_x));
    v.push_back(number("rad.W", &RunConfig::rad, &RadSpec::W));
    v.push_back(number("rad.sigma_sc", &RunConfig::rad, &RadSpec::sigma_sc));
    v.push_back(number("rad.sup_dual_w", &RunConfig::rad, &RadSpec::sup_dual_w));
    v.push_back(number("rad.max_x2", &RunConfig::rad, &RadSpec::max_x2));
    v.push_back(number("rad.W2", &RunConfig::rad, &RadSpec::W2));
    v.push_back(number("rad.lambda_min", &RunConfig::rad, &RadSpec::lambda_min));
    v.push_back(number("rad.max_x_Ainv", &RunConfig::rad, &RadSpec::max_x_Ainv));
    v.push_back(number("rad.WA", &RunConfig::rad, &RadSpec::WA));
    v.push_back(list("rad.lambda_alpha", &RunConfig::rad, &RadSpec::lambda_alpha));
    v.push_back(number("rad.clean", &RunConfig::rad, &RadSpec::clean));
    v.push_back(number("rad.r_norm", &RunConfig::rad, &RadSpec::r_norm));
    return v;
  }();
  return f;
}

Value parse_value(const std::string& key, const std::string& raw, const std::string& where) {
  Value v;
  if (raw.empty()) throw ConfigError(where + "key '" + key + "' has no value");
  if (raw.front() == '[') {
    if (raw.back() != ']') throw ConfigError(where + "unterminated list");
    v.is_list = true;
    std::string body = raw.substr(1, raw.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) v.items.push_back(item);
    }
    return v;
  }
  v.scalar = raw;
  return v;
}

// Strips a trailing comment that is not inside quotes.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

void finalize(RunConfig& c) {
  if (c.problem.geometry == Geometry::mahalanobis) {
    c.problem.measure = c.swfm.case_name.empty()
                            ? swfm_table_measure(c.swfm.table, c.swfm.w)
                            : swfm_case_measure(c.swfm.table, parse_swfm_case(c.swfm.case_name));
  }
  c.problem = validate_config(c.problem);
  c.solver.validate();
  if (!(c.tune.lo > 0 && c.tune.hi > c.tune.lo && c.tune.rel_width > 0))
    throw ConfigError("tune needs 0 < lo < hi and rel_width > 0");
  if (c.sim.d < 2 || c.sim.seeds < 1 || c.sim.n_test < 1)
    throw ConfigError("sim needs d >= 2, seeds >= 1, n_test >= 1");
  if (c.sweep.r_points < 2 || !(c.sweep.r_max > c.sweep.r_min) || c.sweep.r_min < 1)
    throw ConfigError("sweep needs r_points >= 2 and 1 <= r_min < r_max");
  if (c.scaling.points < 2 || !(c.scaling.alpha_min > 0 && c.scaling.alpha_max > c.scaling.alpha_min))
    throw ConfigError("scaling needs points >= 2 and 0 < alpha_min < alpha_max");
  if (c.rad.n < 1 || c.rad.d < 1) throw ConfigError("rad.n and rad.d must be positive");
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  RunConfig c;
  std::map<std::string, const Field*> index;
  for (const auto& f : fields()) index[f.name] = &f;
  auto apply = [&](const std::string& key, const std::string& raw, const std::string& where) {
    auto it = index.find(key);
    if (it == index.end()) throw ConfigError(where + "unknown key '" + key + "'");
    it->second->set(c, key, parse_value(key, raw, where));
  };

  std::map<std::string, int> seen;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw_line;
  int line = 0;
  while (std::getline(in, raw_line)) {
    ++line;
    const std::string where = "line " + std::to_string(line) + ": ";
    std::string s = trim(strip_comment(raw_line));
    if (s.empty()) continue;
    if (s.front() == '[' && s.find('=') == std::string::npos) {
      if (s.back() != ']') throw ConfigError(where + "bad section header");
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    std::string key = trim(s.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    if (seen.count(key)) throw ConfigError(where + "duplicate key '" + key + "'");
    seen[key] = line;
    apply(key, trim(s.substr(eq + 1)), where);
  }
  for (const auto& o : overrides) {
    std::size_t eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "': expected key=value");
    apply(trim(o.substr(0, eq)), trim(o.substr(eq + 1)), "override: ");
  }
  finalize(c);
  return c;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), overrides);
}

std::string echo_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& f : fields()) out += std::string(f.name) + " = " + f.get(cfg) + "\n";
  return out;
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : echo_config(cfg)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rerm

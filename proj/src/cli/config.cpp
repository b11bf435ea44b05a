#include "pevo/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "pevo/common/errors.hpp"

namespace pevo::cli {

namespace {

using coefficients::FamilySpec;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

double to_double(const std::string& s, const std::string& where) {
  const std::string v = trim(s);
  if (v == "inf") return std::numeric_limits<double>::infinity();
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || v.empty())
    throw ConfigError(where + ": expected a number, got '" + v + "'");
  return out;
}

long long to_int(const std::string& s, const std::string& where) {
  const std::string v = trim(s);
  long long out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || v.empty())
    throw ConfigError(where + ": expected an integer, got '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& s, const std::string& where) {
  const std::string v = trim(s);
  std::uint64_t out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || v.empty())
    throw ConfigError(where + ": expected an unsigned integer, got '" + v + "'");
  return out;
}

std::vector<double> to_list(const std::string& s, const std::string& where) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.push_back(to_double(item, where));
  return out;
}

std::vector<int> to_int_list(const std::string& s, const std::string& where) {
  std::vector<int> out;
  for (double v : to_list(s, where)) {
    if (v != std::floor(v)) throw ConfigError(where + ": expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_number(static_cast<double>(v[i]));
  }
  return out;
}

struct Field {
  const char* section;
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

#define NUM(sec, key, expr)                                                                  \
  Field{sec, key, [](const RunConfig& c) { return format_number(static_cast<double>(c.expr)); }, \
        [](RunConfig& c, const std::string& v, const std::string& w) { c.expr = to_double(v, w); }}
#define INT(sec, key, expr)                                                                  \
  Field{sec, key, [](const RunConfig& c) { return std::to_string(c.expr); },                 \
        [](RunConfig& c, const std::string& v, const std::string& w) {                       \
          c.expr = static_cast<decltype(c.expr)>(to_int(v, w));                              \
        }}
#define STR(sec, key, expr)                                                         \
  Field{sec, key, [](const RunConfig& c) { return c.expr; },                        \
        [](RunConfig& c, const std::string& v, const std::string&) { c.expr = trim(v); }}

// family keys, shared by [family] and [compare]
std::vector<Field> family_fields(const char* sec, FamilySpec& (*spec)(RunConfig&),
                                 const FamilySpec& (*cspec)(const RunConfig&), std::string RunConfig::*table) {
  std::vector<Field> f;
  auto num = [&](const char* key, double FamilySpec::*m) {
    f.push_back({sec, key, [cspec, m](const RunConfig& c) { return format_number(cspec(c).*m); },
                 [spec, m](RunConfig& c, const std::string& v, const std::string& w) { spec(c).*m = to_double(v, w); }});
  };
  f.push_back({sec, "name", [cspec](const RunConfig& c) { return cspec(c).name; },
               [spec](RunConfig& c, const std::string& v, const std::string&) { spec(c).name = trim(v); }});
  f.push_back({sec, "p", [cspec](const RunConfig& c) { return std::to_string(cspec(c).p); },
               [spec](RunConfig& c, const std::string& v, const std::string& w) {
                 spec(c).p = static_cast<int>(to_int(v, w));
               }});
  num("T", &FamilySpec::T);
  num("c", &FamilySpec::c);
  num("decay", &FamilySpec::decay);
  num("re_sub", &FamilySpec::re_sub);
  num("ap0", &FamilySpec::ap0);
  num("ap1", &FamilySpec::ap1);
  num("ap_omega", &FamilySpec::ap_omega);
  f.push_back({sec, "table", [table](const RunConfig& c) { return c.*table; },
               [table](RunConfig& c, const std::string& v, const std::string&) { c.*table = trim(v); }});
  return f;
}

FamilySpec& fam(RunConfig& c) { return c.family; }
const FamilySpec& cfam(const RunConfig& c) { return c.family; }
FamilySpec& cmp(RunConfig& c) {
  if (!c.compare) c.compare = FamilySpec{};
  return *c.compare;
}
const FamilySpec& ccmp(const RunConfig& c) { return *c.compare; }

const std::vector<Field>& fields() {
  static const std::vector<Field> all = [] {
    std::vector<Field> f;
    f.push_back(STR("run", "command", command));
    f.push_back(STR("run", "out", out));
    f.push_back({"run", "seed", [](const RunConfig& c) { return std::to_string(c.seed); },
                 [](RunConfig& c, const std::string& v, const std::string& w) { c.seed = to_u64(v, w); }});
    f.push_back(INT("run", "parallel", parallel));
    for (auto& x : family_fields("family", fam, cfam, &RunConfig::family_table)) f.push_back(x);
    for (auto& x : family_fields("compare", cmp, ccmp, &RunConfig::compare_table)) f.push_back(x);
    f.push_back(NUM("plan", "M_target", plan.M_target));
    f.push_back({"plan", "ks", [](const RunConfig& c) { return join(c.plan.ks); },
                 [](RunConfig& c, const std::string& v, const std::string& w) { c.plan.ks = to_int_list(v, w); }});
    f.push_back({"plan", "rhos", [](const RunConfig& c) { return join(c.plan.rhos); },
                 [](RunConfig& c, const std::string& v, const std::string& w) { c.plan.rhos = to_list(v, w); }});
    f.push_back({"plan", "qs", [](const RunConfig& c) { return join(c.plan.qs); },
                 [](RunConfig& c, const std::string& v, const std::string& w) { c.plan.qs = to_list(v, w); }});
    f.push_back(NUM("plan", "a", plan.a));
    f.push_back(NUM("plan", "mu", plan.mu));
    f.push_back(NUM("plan", "a_eff", plan.a_eff));
    f.push_back(NUM("plan", "mu_eff", plan.mu_eff));
    f.push_back(INT("plan", "s_cap", plan.s_cap));
    f.push_back({"plan", "xk_mode",
                 [](const RunConfig& c) { return std::string(c.plan.xk_mode == lab::XkMode::center ? "center" : "argmax"); },
                 [](RunConfig& c, const std::string& v, const std::string& w) {
                   const auto s = trim(v);
                   if (s == "center") c.plan.xk_mode = lab::XkMode::center;
                   else if (s == "argmax") c.plan.xk_mode = lab::XkMode::argmax;
                   else throw ConfigError(w + ": expected center or argmax, got '" + s + "'");
                 }});
    f.push_back(NUM("plan", "x_center", plan.x_center));
    f.push_back(NUM("plan", "A_s", plan.A_s));
    f.push_back(NUM("plan", "c1", plan.c1));
    f.push_back({"plan", "checkpoints", [](const RunConfig& c) { return join(c.plan.checkpoint_fractions); },
                 [](RunConfig& c, const std::string& v, const std::string& w) {
                   c.plan.checkpoint_fractions = to_list(v, w);
                 }});
    f.push_back(NUM("grid", "L", plan.L));
    f.push_back({"grid", "N", [](const RunConfig& c) { return std::to_string(c.grid_N); },
                 [](RunConfig& c, const std::string& v, const std::string& w) { c.grid_N = to_u64(v, w); }});
    f.push_back(NUM("grid", "oversampling", plan.oversampling));
    f.push_back(NUM("grid", "guard", plan.guard));
    f.push_back({"grid", "max_N", [](const RunConfig& c) { return std::to_string(c.plan.max_N); },
                 [](RunConfig& c, const std::string& v, const std::string& w) { c.plan.max_N = to_u64(v, w); }});
    f.push_back({"solver", "factor",
                 [](const RunConfig& c) {
                   return std::string(c.plan.solver.factor == solver::IntegratingFactor::full_background ? "full_background"
                                                                                                        : "principal_only");
                 },
                 [](RunConfig& c, const std::string& v, const std::string& w) {
                   const auto s = trim(v);
                   if (s == "full_background") c.plan.solver.factor = solver::IntegratingFactor::full_background;
                   else if (s == "principal_only") c.plan.solver.factor = solver::IntegratingFactor::principal_only;
                   else throw ConfigError(w + ": expected full_background or principal_only, got '" + s + "'");
                 }});
    f.push_back(NUM("solver", "c_step", plan.solver.c_step));
    f.push_back(NUM("solver", "dt", plan.solver.dt));
    f.push_back(NUM("solver", "wrap_threshold", plan.solver.wrap_threshold));
    f.push_back({"condition", "rhos", [](const RunConfig& c) { return join(c.condition_rhos); },
                 [](RunConfig& c, const std::string& v, const std::string& w) { c.condition_rhos = to_list(v, w); }});
    f.push_back({"condition", "side", [](const RunConfig& c) { return coefficients::to_string(c.side); },
                 [](RunConfig& c, const std::string& v, const std::string& w) {
                   try {
                     c.side = coefficients::side_from_string(trim(v));
                   } catch (const Error&) {
                     throw ConfigError(w + ": expected full, forward or backward, got '" + trim(v) + "'");
                   }
                 }});
    f.push_back(NUM("condition", "x_window", search.x_window));
    f.push_back(NUM("condition", "x_step", search.x_step));
    f.push_back(NUM("condition", "delta_max", search.delta_max));
    f.push_back(NUM("solve", "rho", solve.rho));
    f.push_back(NUM("solve", "t_end", solve.t_end));
    f.push_back(INT("solve", "checkpoints", solve.checkpoints));
    f.push_back(INT("symbol", "alpha", symbol.alpha));
    f.push_back(INT("symbol", "beta", symbol.beta));
    f.push_back(NUM("symbol", "t", symbol.t));
    f.push_back(NUM("symbol", "rho", symbol.rho));
    f.push_back(STR("symbol", "regime", symbol.regime));
    f.push_back(INT("symbol", "nx", symbol.nx));
    f.push_back(INT("symbol", "nxi", symbol.nxi));
    return f;
  }();
  return all;
}

#undef NUM
#undef INT
#undef STR

// keep the derived plan fields in step with the sections they come from
void sync(RunConfig& c) {
  c.plan.family = c.family;
  c.plan.parallel = c.parallel;
  c.plan.solver.guard = c.plan.guard;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"check-condition", "lemma1",         "solve",      "dichotomy",
                                                 "calculus-tests",  "print-defaults", "dump-symbol"};
  return names;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void RunConfig::validate() const {
  const auto& cmds = command_names();
  if (std::find(cmds.begin(), cmds.end(), command) == cmds.end())
    throw ConfigError("run.command: unknown command '" + command + "'");
  if (parallel < 1) throw ConfigError("run.parallel: must be >= 1");
  if (out.empty()) throw ConfigError("run.out: empty output directory");
  const auto& names = coefficients::family_names();
  auto check_family = [&](const FamilySpec& f, const std::string& table, const char* sec) {
    const std::string s(sec);
    if (std::find(names.begin(), names.end(), f.name) == names.end())
      throw ConfigError(s + ".name: unknown family '" + f.name + "'");
    if (f.p < 1) throw ConfigError(s + ".p: must be >= 1");
    if (!(f.T > 0)) throw ConfigError(s + ".T: must be positive");
    if (f.name == "custom_table" && table.empty()) throw ConfigError(s + ".table: custom_table needs a CSV path");
  };
  check_family(family, family_table, "family");
  if (compare) check_family(*compare, compare_table, "compare");
  try {
    plan.validate();
    plan.solver.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("plan/grid/solver: ") + e.what());
  }
  if (condition_rhos.empty()) throw ConfigError("condition.rhos: empty list");
  for (std::size_t i = 0; i < condition_rhos.size(); ++i) {
    if (!(condition_rhos[i] > 0)) throw ConfigError("condition.rhos: entries must be positive");
    if (i && !(condition_rhos[i] > condition_rhos[i - 1])) throw ConfigError("condition.rhos: must be increasing");
  }
  if (!(search.x_window > 0) || !(search.x_step > 0) || !(search.delta_max >= search.delta_start))
    throw ConfigError("condition: x_window, x_step must be positive and delta_max >= 1");
  if (!(solve.rho >= 1)) throw ConfigError("solve.rho: must be >= 1");
  if (solve.t_end < 0 || solve.t_end > family.T) throw ConfigError("solve.t_end: must lie in [0, T]");
  if (solve.checkpoints < 1) throw ConfigError("solve.checkpoints: must be >= 1");
  if (symbol.alpha < 0 || symbol.beta < 0) throw ConfigError("symbol.alpha/beta: must be >= 0");
  if (symbol.regime != "scaled" && symbol.regime != "asymptotic") throw ConfigError("symbol.regime: expected scaled or asymptotic");
  if (symbol.nx < 2 || symbol.nxi < 2) throw ConfigError("symbol.nx/nxi: need at least 2 samples");
  if (grid_N != 0 && (grid_N < 16 || (grid_N & (grid_N - 1)) != 0))
    throw ConfigError("grid.N: must be 0 or a power of two >= 16");
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  RunConfig c;
  const auto& fs = fields();
  for (const auto& [sec, node] : tree) {
    if (node.empty()) throw ConfigError(origin + ": key '" + sec + "' outside a section");
    bool known = false;
    for (const auto& f : fs) known = known || sec == f.section;
    if (!known) throw ConfigError(origin + ": unknown section [" + sec + "]");
    if (sec == "compare" && !c.compare) c.compare = FamilySpec{};
    for (const auto& [key, val] : node) {
      const std::string where = origin + ": " + sec + "." + key;
      auto it = std::find_if(fs.begin(), fs.end(), [&](const Field& f) { return sec == f.section && key == f.key; });
      if (it == fs.end()) throw ConfigError(where + ": unknown key");
      it->set(c, val.data(), where);
    }
  }
  sync(c);
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

std::string canonical(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& f : fields()) {
    if (std::string(f.section) == "compare" && !cfg.compare) continue;
    if (section != f.section) {
      if (!section.empty()) out += "\n";
      section = f.section;
      out += "[" + section + "]\n";
    }
    out += std::string(f.key) + " = " + f.get(cfg) + "\n";
  }
  return out;
}

std::string config_hash(const RunConfig& cfg) {
  // the output directory and worker count do not change any result
  RunConfig c = cfg;
  c.out = "out";
  c.parallel = 1;
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : canonical(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pevo::cli

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pevo/coefficients/condition.hpp"
#include "pevo/coefficients/families.hpp"
#include "pevo/lab/experiment.hpp"

namespace pevo::cli {

const std::vector<std::string>& command_names();

struct SolveSection {
  double rho = 4.0;          // packet frequency n = rho^{a_eff}
  double t_end = 0.0;        // 0: the horizon rho / n^{p-1}
  int checkpoints = 8;       // uniform in (0, t_end]
};

struct SymbolSection {
  int alpha = 0, beta = 0;
  double t = 0.0;
  double rho = 4.0;
  std::string regime = "scaled";  // scaled: (a_eff, mu_eff); asymptotic: (a, mu)
  int nx = 101, nxi = 101;
};

// Everything a command needs. Sections of the text form: run, family, compare, plan, grid,
// solver, condition, solve, symbol.
struct RunConfig {
  std::string command = "check-condition";
  std::string out = "out";
  std::uint64_t seed = 2024;
  int parallel = 1;

  coefficients::FamilySpec family;
  std::string family_table;  // CSV path for custom_table
  std::optional<coefficients::FamilySpec> compare;
  std::string compare_table;

  lab::ExperimentPlan plan;  // plan.family mirrors `family`
  std::size_t grid_N = 0;    // solve grid override; 0 sizes the grid from the packet frequency

  std::vector<double> condition_rhos = {1, 2, 4, 8, 16, 32, 64};
  coefficients::Side side = coefficients::Side::full;
  coefficients::SearchSpec search;

  SolveSection solve;
  SymbolSection symbol;

  // re-validates every invariant; throws ConfigError naming the offending key
  void validate() const;
};

// Parses the sectioned key = value text. Unknown sections or keys, malformed values and
// syntax errors throw ConfigError with the line number or the section.key name.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);

// Canonical text: every section and key in a fixed order, numbers in shortest round-trip form.
// parse_config(canonical(c)) has the same canonical text.
std::string canonical(const RunConfig& cfg);

// 64-bit FNV-1a of the canonical text with run.out and run.parallel at their defaults, as 16 hex digits
std::string config_hash(const RunConfig& cfg);

// shortest round-trip decimal form of a double ("inf", "-inf", "nan" for non-finite values)
std::string format_number(double v);

}  // namespace pevo::cli

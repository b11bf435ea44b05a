#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "pevo/cli/config.hpp"
#include "pevo/coefficients/condition.hpp"
#include "pevo/lab/experiment.hpp"

namespace pevo::cli {

// Exit status contract: 0 success, 1 error (parse, resource, failed frozen bound), 2 verdict
// "violated" from check-condition.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitViolated = 2;

struct RunResult {
  int exit_code = kExitOk;
  std::vector<std::string> files;  // paths written, in order
  std::string message;             // error text when exit_code == kExitError
};

// Executes cfg.command, writing artifacts under cfg.out. Library errors are caught and reported
// through the result; files written before the error are kept. `log` receives one line per artifact.
RunResult run(const RunConfig& cfg, std::ostream& log);

// Comment rows that open every output file: config hash and seed.
std::string header_rows(const RunConfig& cfg);

enum class PlotKind { growth_curve, exponent_fit, condition_profile };

// Tidy CSV for plotting. growth_curve: one row per (k, t) of every record; exponent_fit: one row
// per ok record against the line `fit` of log sigma(t_k) over rho (or log rho when fit_log_rho);
// condition_profile: one row per rho of `report`.
void emit_plotdata(const std::vector<lab::GrowthRecord>& records, PlotKind kind, const std::string& path,
                   const std::string& header, const lab::FitLine& fit = {}, bool fit_log_rho = false);
void emit_plotdata(const coefficients::ConditionReport& report, const std::string& path, const std::string& header);

}  // namespace pevo::cli

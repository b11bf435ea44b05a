#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pevo/cli/config.hpp"
#include "pevo/cli/run.hpp"
#include "pevo/common/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"p-evolution laboratory: condition checks, Lemma 1 points, solves and the dichotomy experiment"};
  std::string config_path, out, command;
  std::optional<std::uint64_t> seed;
  std::optional<int> parallel;
  app.add_option("--config", config_path, "sectioned key = value config file (defaults when omitted)");
  app.add_option("--out", out, "output directory (overrides run.out)");
  app.add_option("--seed", seed, "RNG seed recorded in every artifact (overrides run.seed)");
  app.add_option("--parallel", parallel, "worker threads for per-k experiments (overrides run.parallel)")
      ->check(CLI::PositiveNumber);
  app.add_option("--command", command, "one of check-condition, lemma1, solve, dichotomy, calculus-tests, "
                                       "print-defaults, dump-symbol (overrides run.command)");
  CLI11_PARSE(app, argc, argv);

  pevo::cli::RunConfig cfg;
  try {
    cfg = config_path.empty() ? pevo::cli::RunConfig{} : pevo::cli::load_config(config_path);
    if (!out.empty()) cfg.out = out;
    if (seed) cfg.seed = *seed;
    if (parallel) {
      cfg.parallel = *parallel;
      cfg.plan.parallel = *parallel;
    }
    if (!command.empty()) cfg.command = command;
    cfg.validate();
  } catch (const pevo::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return pevo::cli::kExitError;
  }
  const auto res = pevo::cli::run(cfg, cfg.command == "print-defaults" ? std::cout : std::cerr);
  if (res.exit_code == pevo::cli::kExitError) std::cerr << "error: " << res.message << "\n";
  return res.exit_code;
}

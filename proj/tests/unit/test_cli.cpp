#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pevo/cli/config.hpp"
#include "pevo/cli/run.hpp"
#include "pevo/common/errors.hpp"

using namespace pevo;
using namespace pevo::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("pevo_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string config_text(const std::string& out, const std::string& body) {
  return "[run]\nout = " + out + "\n" + body;
}

}  // namespace

TEST_CASE("defaults echo back byte-identically") {
  const auto text = canonical(RunConfig{});
  const auto parsed = parse_config(text);
  CHECK(canonical(parsed) == text);
  CHECK(config_hash(parsed) == config_hash(RunConfig{}));
  CHECK(config_hash(parsed).size() == 16);
}

TEST_CASE("partial config round trip") {
  const std::string text =
      "[family]\nname = constant_imag\nc = 0.1\n\n[plan]\nrhos = 4, 8\nqs = 0\n\n[compare]\nname = decaying_imag\n";
  const auto c = parse_config(text);
  CHECK(c.family.name == "constant_imag");
  CHECK(c.family.c == 0.1);
  CHECK(c.plan.family.c == 0.1);
  CHECK(c.plan.rhos == std::vector<double>{4, 8});
  REQUIRE(c.compare);
  CHECK(c.compare->name == "decaying_imag");
  const auto canon = canonical(c);
  CHECK(canonical(parse_config(canon)) == canon);
  CHECK(canon.find("[compare]") != std::string::npos);
  CHECK(canonical(RunConfig{}).find("[compare]") == std::string::npos);
  // numbers survive exactly
  RunConfig d;
  d.plan.x_center = 0.1 + 0.2;
  CHECK(parse_config(canonical(d)).plan.x_center == d.plan.x_center);
}

TEST_CASE("hash ignores the output directory and worker count only") {
  RunConfig a, b, c;
  b.out = "elsewhere";
  b.parallel = 4;
  c.seed = 7;
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("parse errors name the line or the key") {
  auto msg = [](const std::string& text) {
    try {
      parse_config(text, "cfg.ini");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(msg("[family]\nc = 1\n[plan\n").find("cfg.ini:3") != std::string::npos);
  CHECK(msg("[family]\nc = abc\n").find("family.c") != std::string::npos);
  CHECK(msg("[plan]\nfoo = 1\n").find("plan.foo") != std::string::npos);
  CHECK(msg("[nope]\nx = 1\n").find("[nope]") != std::string::npos);
  CHECK(msg("x = 1\n").find("outside a section") != std::string::npos);
  CHECK(msg("[family]\nname = nope\n").find("family.name") != std::string::npos);
  CHECK(msg("[run]\ncommand = fly\n").find("run.command") != std::string::npos);
  CHECK(msg("[plan]\nrhos = 8,4\n").find("increasing") != std::string::npos);
  CHECK(msg("[plan]\nks = 1.5\n").find("plan.ks") != std::string::npos);
  CHECK(msg("[family]\nc = 1\nc = 2\n").find("cfg.ini:3") != std::string::npos);
  CHECK(msg("[family]\nname = custom_table\n").find("family.table") != std::string::npos);
  CHECK(msg("[grid]\nN = 100\n").find("grid.N") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/pevo.ini"), ConfigError);
}

TEST_CASE("check-condition exit codes and artifacts") {
  const auto dir = scratch("cc");
  std::ostringstream log;
  auto zero = parse_config(config_text(dir.string(), "[family]\nname = zero\n"));
  const auto r0 = run(zero, log);
  CHECK(r0.exit_code == kExitOk);
  const auto j0 = nlohmann::json::parse(slurp((dir / "zero_2_condition.json").string()));
  CHECK(j0["verdict"] == "holds");
  CHECK(j0["fitted_M"].get<double>() == 0.0);

  auto cst = parse_config(config_text(dir.string(), "[family]\nname = constant_imag\nc = 0.5\n"));
  const auto r1 = run(cst, log);
  CHECK(r1.exit_code == kExitViolated);
  const auto csv = slurp((dir / "constant_imag_2_condition.csv").string());
  CHECK(csv.rfind("# config_hash=" + config_hash(cst) + "\n# seed=2024\nrho,sup_integral,", 0) == 0);
  const auto prof = slurp((dir / "constant_imag_2_condition_profile.csv").string());
  CHECK(prof.find("rho,sup_integral,M_log_bound\n") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("dichotomy writes per-k CSVs, plot data and summaries") {
  const auto dir = scratch("dich");
  std::ostringstream log;
  auto cfg = parse_config(config_text(dir.string(),
                                      "command = dichotomy\n[family]\nname = constant_imag\nc = 0.25\n"
                                      "[compare]\nname = zero\n[plan]\nrhos = 4,8\nks = 1,2\n"));
  const auto r = run(cfg, log);
  CHECK(r.exit_code == kExitOk);
  for (const char* f : {"constant_imag_2_1.csv", "constant_imag_2_2.csv", "constant_imag_2_growth_curve.csv",
                        "constant_imag_2_exponent_fit.csv", "constant_imag_2_dichotomy.json", "zero_2_1.csv",
                        "constant_imag_2_vs_zero_2_separation.json"})
    CHECK(fs::exists(dir / f));
  const auto per_k = slurp((dir / "constant_imag_2_1.csv").string());
  CHECK(per_k.find("k,rho_k,n,t,sigma_k,log_sigma_k,bk_integral,drift_error,d1_ratio,log_norm_0_0,") != std::string::npos);
  const auto growth = slurp((dir / "constant_imag_2_growth_curve.csv").string());
  CHECK(growth.find("k,t,sigma,log_sigma\n") != std::string::npos);
  const auto fit = slurp((dir / "constant_imag_2_exponent_fit.csv").string());
  CHECK(fit.find("rho_k,log_sigma_end,fit_value,residual\n") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp((dir / "constant_imag_2_dichotomy.json").string()));
  CHECK(j["schema"] == "pevo.dichotomy/1");
  CHECK(j["records"].size() == 2);
  CHECK(j["q_verdicts"].size() == 3);
  CHECK(j["regimes"]["solve"]["a_eff"].get<double>() == 2.2);
  fs::remove_all(dir);
}

TEST_CASE("resource errors keep partial outputs and exit 1") {
  const auto dir = scratch("res");
  std::ostringstream log;
  auto cfg = parse_config(config_text(dir.string(), "command = dichotomy\n[grid]\nmax_N = 20000\n"));
  const auto r = run(cfg, log);
  CHECK(r.exit_code == kExitError);
  CHECK(r.message.find("failed") != std::string::npos);
  CHECK(fs::exists(dir / "zero_2_1.csv"));
  CHECK_FALSE(fs::exists(dir / "zero_2_2.csv"));
  const auto j = nlohmann::json::parse(slurp((dir / "zero_2_dichotomy.json").string()));
  CHECK(j["records"][1].contains("error"));
  fs::remove_all(dir);
}

TEST_CASE("plot data from records") {
  const auto dir = scratch("plot");
  fs::create_directories(dir);
  lab::GrowthRecord r;
  r.k = 1;
  r.rho = 4;
  r.t = {0.0, 0.5};
  r.log_sigma = {0.0, 1.0};
  emit_plotdata({r}, PlotKind::growth_curve, (dir / "g.csv").string(), "# h\n");
  CHECK(slurp((dir / "g.csv").string()) == "# h\nk,t,sigma,log_sigma\n1,0,1,0\n1,0.5,2.718281828459045,1\n");
  lab::FitLine f;
  f.slope = 0.25;
  emit_plotdata({r}, PlotKind::exponent_fit, (dir / "e.csv").string(), "", f);
  CHECK(slurp((dir / "e.csv").string()).find("\n4,1,1,0\n") != std::string::npos);
  CHECK_THROWS_AS(emit_plotdata({r}, PlotKind::condition_profile, (dir / "c.csv").string(), ""), MisuseError);
  fs::remove_all(dir);
}

TEST_CASE("re-running a command reproduces byte-identical CSVs") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  std::ostringstream log;
  const std::string body = "command = lemma1\n[family]\nname = constant_imag\nc = 0.5\n[plan]\nks = 1,2\n";
  run(parse_config(config_text(a.string(), body)), log);
  run(parse_config(config_text(b.string(), body)), log);
  int compared = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().extension() != ".csv") continue;
    CHECK(slurp(e.path().string()) == slurp((b / e.path().filename()).string()));
    ++compared;
  }
  CHECK(compared >= 3);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("print-defaults and dump-symbol") {
  std::ostringstream log;
  RunConfig cfg;
  cfg.command = "print-defaults";
  CHECK(run(cfg, log).exit_code == kExitOk);
  CHECK(log.str() == canonical(RunConfig{}));
  const auto dir = scratch("sym");
  cfg.command = "dump-symbol";
  cfg.out = dir.string();
  cfg.symbol.nx = cfg.symbol.nxi = 5;
  const auto r = run(cfg, log);
  CHECK(r.exit_code == kExitOk);
  const auto text = slurp((dir / "zero_2_symbol_0_0.csv").string());
  CHECK(text.find("x,xi,re,im\n") != std::string::npos);
  // the centre sample is w(x_k, n) = rho^{1/2}
  CHECK(text.find("\n0,21.112126572366314,2,0\n") != std::string::npos);
  fs::remove_all(dir);
}

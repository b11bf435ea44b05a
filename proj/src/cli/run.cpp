#include "pevo/cli/run.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>

#include <json.hpp>

#include "pevo/coefficients/lemma1.hpp"
#include "pevo/common/errors.hpp"
#include "pevo/lab/calibration.hpp"
#include "pevo/lab/frozen.hpp"
#include "pevo/solver/cauchy.hpp"
#include "pevo/symbols/localizer.hpp"
#include "pevo/symbols/packet.hpp"

namespace pevo::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Non-finite values become null in JSON.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json num_list(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

class Csv {
 public:
  Csv(const std::string& path, const std::string& header, const std::vector<std::string>& columns) : f_(path) {
    if (!f_) throw ResourceError("cannot write " + path);
    f_ << header;
    row(columns);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) f_ << (i ? "," : "") << cells[i];
    f_ << "\n";
  }

 private:
  std::ofstream f_;
};

std::string fmt(double v) { return format_number(v); }

class Context {
 public:
  Context(const RunConfig& cfg, std::ostream& log, RunResult& res) : cfg_(cfg), log_(log), res_(res) {
    fs::create_directories(cfg.out);
    header_ = header_rows(cfg);
  }
  std::string path(const std::string& name) {
    auto p = (fs::path(cfg_.out) / name).string();
    res_.files.push_back(p);
    log_ << "wrote " << p << "\n";
    return p;
  }
  const std::string& header() const { return header_; }
  void write_json(const std::string& name, json j) {
    j["config_hash"] = config_hash(cfg_);
    j["seed"] = cfg_.seed;
    std::ofstream f(path(name));
    f << j.dump(2) << "\n";
  }

 private:
  const RunConfig& cfg_;
  std::ostream& log_;
  RunResult& res_;
  std::string header_;
};

coefficients::FamilySpec resolved(coefficients::FamilySpec spec, const std::string& table) {
  if (spec.name == "custom_table") spec.table = coefficients::read_table_csv(table);
  return spec;
}

std::string prefix(const coefficients::FamilySpec& f) { return f.name + "_" + std::to_string(f.p); }

json fit_json(const lab::FitLine& f) {
  return {{"slope", num(f.slope)}, {"intercept", num(f.intercept)}, {"rss", num(f.rss)}, {"points", f.points}};
}

int cmd_check_condition(const RunConfig& cfg, Context& ctx) {
  const auto model = coefficients::make_family(resolved(cfg.family, cfg.family_table));
  const auto rep = coefficients::check_condition(model, cfg.condition_rhos, cfg.search, cfg.side);
  const auto pre = prefix(cfg.family);
  {
    Csv csv(ctx.path(pre + "_condition.csv"), ctx.header(),
            {"rho", "sup_integral", "bound_value", "argmax_x", "half_window_sup"});
    for (std::size_t i = 0; i < rep.rho_grid.size(); ++i)
      csv.row({fmt(rep.rho_grid[i]), fmt(rep.sup_integrals[i]), fmt(rep.bound_values[i]), fmt(rep.argmax_x[i]),
               fmt(rep.half_window_sup[i])});
  }
  emit_plotdata(rep, ctx.path(pre + "_condition_profile.csv"), ctx.header());
  ctx.write_json(pre + "_condition.json",
                 {{"schema", "pevo.condition/1"},
                  {"family", cfg.family.name},
                  {"p", cfg.family.p},
                  {"side", coefficients::to_string(rep.side)},
                  {"rho", num_list(rep.rho_grid)},
                  {"sup_integrals", num_list(rep.sup_integrals)},
                  {"fitted_M", num(rep.fitted_M)},
                  {"fitted_N", num(rep.fitted_N)},
                  {"growth_exponent", num(rep.growth_exponent)},
                  {"window_sensitive", rep.window_sensitive},
                  {"verdict", coefficients::to_string(rep.verdict)}});
  return rep.verdict == coefficients::Verdict::violated ? kExitViolated : kExitOk;
}

int cmd_lemma1(const RunConfig& cfg, Context& ctx) {
  const auto model = coefficients::make_family(resolved(cfg.family, cfg.family_table));
  const auto pts = coefficients::lemma1_sequence(model, cfg.plan.M_target, cfg.plan.ks, cfg.search);
  const auto pre = prefix(cfg.family);
  json points = json::array();
  {
    Csv csv(ctx.path(pre + "_lemma1.csv"), ctx.header(),
            {"k", "y_k", "delta_k", "s_k", "x_k", "rho_k", "tau_star", "t_star", "margin_ii", "margin_iii",
             "margin_ii_star", "margin_iii_star", "n", "t_k", "bk_end", "bk_end_bound", "bk_min_partial"});
    for (const auto& pt : pts) {
      const auto bk = lab::bk_bookkeeping(model, pt, cfg.plan);
      csv.row({std::to_string(pt.k), fmt(pt.y_k), fmt(pt.delta_k), fmt(pt.s_k), fmt(pt.x_k), fmt(pt.rho_k),
               fmt(pt.tau_star), fmt(pt.t_star), fmt(pt.margin_ii), fmt(pt.margin_iii), fmt(pt.margin_ii_star),
               fmt(pt.margin_iii_star), fmt(bk.n), fmt(bk.t_k), fmt(bk.end), fmt(bk.end_bound), fmt(bk.min_partial)});
      points.push_back({{"k", pt.k},
                        {"x_k", num(pt.x_k)},
                        {"rho_k", num(pt.rho_k)},
                        {"s_k", num(pt.s_k)},
                        {"margin_ii", num(pt.margin_ii)},
                        {"margin_iii", num(pt.margin_iii)},
                        {"bk_end", num(bk.end)},
                        {"bk_end_bound", num(bk.end_bound)},
                        {"bk_min_partial", num(bk.min_partial)}});
    }
  }
  for (const auto& pt : pts) {
    Csv csv(ctx.path(pre + "_" + std::to_string(pt.k) + "_profile.csv"), ctx.header(), {"s", "F"});
    for (const auto& [s, F] : pt.F_profile) csv.row({fmt(s), fmt(F)});
  }
  ctx.write_json(pre + "_lemma1.json", {{"schema", "pevo.lemma1/1"},
                                        {"family", cfg.family.name},
                                        {"p", cfg.family.p},
                                        {"M_target", cfg.plan.M_target},
                                        {"A_s", cfg.plan.A_s},
                                        {"verdict", pts.empty() ? "holds" : "violated"},
                                        {"points", points}});
  return kExitOk;
}

int cmd_solve(const RunConfig& cfg, Context& ctx) {
  const auto model = coefficients::make_family(resolved(cfg.family, cfg.family_table));
  const double n = cfg.plan.n_for(cfg.solve.rho);
  const double t_end = cfg.solve.t_end > 0 ? cfg.solve.t_end : cfg.plan.horizon(cfg.solve.rho);
  if (t_end > model.T()) throw DomainError("solve: end time exceeds T");
  auto grid = cfg.grid_N ? psdo::SymbolGrid2D(cfg.plan.L, cfg.grid_N)
                         : psdo::SymbolGrid2D::for_frequency(cfg.plan.L, 2 * n, cfg.plan.oversampling);
  if (grid.N() > cfg.plan.max_N) throw ResourceError("solve: grid exceeds grid.max_N");
  auto gptr = grid.share();
  const auto profile = symbols::build_packet_profile(std::make_shared<const symbols::SmoothCutoff>(), *gptr);
  const auto g = solver::build_wavepacket(profile, cfg.plan.x_center, n, gptr, cfg.plan.guard);
  std::vector<double> cps;
  for (int i = 1; i <= cfg.solve.checkpoints; ++i) cps.push_back(t_end * i / cfg.solve.checkpoints);
  const auto sol = solver::solve_cauchy(model, g, cps, cfg.plan.solver);
  const auto pre = prefix(cfg.family);
  const double ln0 = g.log_norm();
  {
    Csv csv(ctx.path(pre + "_solve.csv"), ctx.header(), {"t", "log_norm", "log_growth"});
    csv.row({fmt(0.0), fmt(ln0), fmt(0.0)});
    for (std::size_t i = 0; i < cps.size(); ++i) csv.row({fmt(cps[i]), fmt(sol.log_norms[i]), fmt(sol.log_norms[i] - ln0)});
  }
  ctx.write_json(pre + "_solve.json", {{"schema", "pevo.solve/1"},
                                       {"family", cfg.family.name},
                                       {"p", cfg.family.p},
                                       {"rho", cfg.solve.rho},
                                       {"n", n},
                                       {"x_k", cfg.plan.x_center},
                                       {"N", gptr->N()},
                                       {"t_end", t_end},
                                       {"dt", sol.dt},
                                       {"steps", sol.steps},
                                       {"kappa", num(sol.kappa)},
                                       {"max_wrap_fraction", sol.max_wrap_fraction},
                                       {"log_growth", num(sol.log_norms.back() - ln0)}});
  return kExitOk;
}

json record_json(const lab::GrowthRecord& r) {
  json j = {{"k", r.k}, {"rho", r.rho}, {"n", r.n}, {"x_k", r.x_k}, {"t_k", r.t_k}, {"N", r.N}};
  if (!r.ok()) {
    j["error"] = r.error;
    return j;
  }
  j["log_sigma0"] = num(r.log_sigma.front());
  j["log_sigma_end"] = num(r.log_sigma.back());
  j["log_growth"] = num(r.log_growth());
  j["index00_log_growth"] = num(r.index_log_growth(0));
  j["growth_rate"] = num(r.growth_rate);
  j["bk_end"] = num(r.bk.back());
  j["bk_margin"] = num(r.bk_margin());
  j["weight"] = num(r.weight);
  j["tail_weight"] = num(r.tail_weight);
  j["max_wrap_fraction"] = num(r.max_wrap_fraction);
  if (r.lemma) j["lemma1"] = {{"x_k", r.lemma->x_k}, {"rho_k", r.lemma->rho_k}, {"s_k", r.lemma->s_k}};
  return j;
}

// writes one family's dichotomy artifacts; returns false when any point failed
bool write_dichotomy(const lab::DichotomyResult& res, const lab::ExperimentPlan& plan,
                     const coefficients::FamilySpec& fam, Context& ctx) {
  const auto pre = prefix(fam);
  bool all_ok = true;
  json recs = json::array();
  for (const auto& r : res.records) {
    recs.push_back(record_json(r));
    if (!r.ok()) {
      all_ok = false;
      continue;
    }
    std::vector<std::string> cols = {"k", "rho_k", "n", "t", "sigma_k", "log_sigma_k", "bk_integral", "drift_error",
                                     "d1_ratio"};
    for (const auto& [a, b] : r.indices) cols.push_back("log_norm_" + std::to_string(a) + "_" + std::to_string(b));
    Csv csv(ctx.path(pre + "_" + std::to_string(r.k) + ".csv"), ctx.header(), cols);
    for (std::size_t c = 0; c < r.t.size(); ++c) {
      std::vector<std::string> row = {std::to_string(r.k), fmt(r.rho),          fmt(r.n),
                                      fmt(r.t[c]),         fmt(std::exp(r.log_sigma[c])), fmt(r.log_sigma[c]),
                                      fmt(r.bk[c]),        fmt(r.drift_error[c]), fmt(r.d1_ratio[c])};
      for (double v : r.log_norms[c]) row.push_back(fmt(v));
      csv.row(row);
    }
  }
  emit_plotdata(res.records, PlotKind::growth_curve, ctx.path(pre + "_growth_curve.csv"), ctx.header());
  const bool exp_class = res.growth_class == "exponential";
  emit_plotdata(res.records, PlotKind::exponent_fit, ctx.path(pre + "_exponent_fit.csv"), ctx.header(),
                exp_class ? res.exp_class : res.upper, !exp_class);
  json qs = json::array();
  for (const auto& q : res.q_verdicts)
    qs.push_back({{"q", q.q},
                  {"threshold_M", q.threshold_M},
                  {"slope_bound", q.slope_bound},
                  {"slope_within_bound", q.slope_within_bound},
                  {"observed", q.observed},
                  {"crossover_rho", num(q.crossover_rho)},
                  {"extrapolated", q.extrapolated}});
  json req = json::array();
  for (double q : plan.qs) req.push_back({{"q", q}, {"required_s", plan.required_s(q)}});
  ctx.write_json(pre + "_dichotomy.json",
                 {{"schema", "pevo.dichotomy/1"},
                  {"family", res.family},
                  {"p", res.p},
                  {"regimes",
                   {{"solve", {{"a_eff", plan.a_eff}, {"mu_eff", plan.mu_eff}}},
                    {"symbolic", {{"a", plan.a}, {"mu", plan.mu}}}}},
                  {"s_eff", plan.s_eff()},
                  {"required_s", req},
                  {"A_s", plan.A_s},
                  {"records", recs},
                  {"fits", {{"lower", fit_json(res.lower)}, {"upper", fit_json(res.upper)}, {"exp_class", fit_json(res.exp_class)}}},
                  {"class_lr", num(res.class_lr)},
                  {"growth_class", res.growth_class},
                  {"verdict", res.verdict},
                  {"q_verdicts", qs},
                  {"contradiction", res.contradiction}});
  return all_ok;
}

int cmd_dichotomy(const RunConfig& cfg, Context& ctx) {
  auto plan = cfg.plan;
  plan.family = resolved(cfg.family, cfg.family_table);
  const auto a = lab::run_dichotomy_experiment(plan);
  bool ok = write_dichotomy(a, plan, cfg.family, ctx);
  if (cfg.compare) {
    auto plan2 = cfg.plan;
    plan2.family = resolved(*cfg.compare, cfg.compare_table);
    const auto b = lab::run_dichotomy_experiment(plan2);
    ok = write_dichotomy(b, plan2, *cfg.compare, ctx) && ok;
    json sep;
    try {
      const auto st = lab::separation_test(a, b);
      sep = {{"slope_first", num(st.first.slope)},
             {"slope_second", num(st.second.slope)},
             {"slope_common", num(st.common.slope)},
             {"rss_common", num(st.rss0)},
             {"rss_separate", num(st.rss1)},
             {"likelihood_ratio", num(st.lr)},
             {"points", st.points}};
    } catch (const DegenerateError& e) {
      sep = {{"error", e.what()}};
    }
    ctx.write_json(prefix(cfg.family) + "_vs_" + prefix(*cfg.compare) + "_separation.json",
                   {{"schema", "pevo.separation/1"}, {"first", a.family}, {"second", b.family}, {"test", sep}});
  }
  if (!ok) throw ResourceError("dichotomy: some points failed; see the records in the JSON summary");
  return kExitOk;
}

int cmd_calculus(const RunConfig& cfg, Context& ctx) {
  const auto cv = lab::calibrate_cv(cfg.seed);
  const auto tb = lab::calibrate_theorem_b();
  {
    Csv csv(ctx.path("calculus_cv.csv"), ctx.header(), {"case", "max_op_ratio", "seminorm", "ratio"});
    for (const auto& c : cv.cases)
      csv.row({c.name, fmt(c.report.max_op_ratio), fmt(c.report.seminorm), fmt(c.report.ratio)});
  }
  {
    Csv csv(ctx.path("calculus_theorem_b.csv"), ctx.header(),
            {"case", "theta", "ell", "p_theta_seminorm", "p1_seminorm", "p2_seminorm", "ratio"});
    for (const auto& c : tb.cases)
      csv.row({c.name, fmt(c.report.theta), std::to_string(c.report.ell), fmt(c.report.p_theta_seminorm),
               fmt(c.report.p1_seminorm), fmt(c.report.p2_seminorm), fmt(c.report.ratio)});
  }
  const bool pinned = cfg.seed == lab::kCorpusSeed;
  const double slack = 1 + lab::frozen::kFrozenSlack;
  bool within = cv.C_cv <= lab::frozen::C_cv * slack;
  json cl = json::array();
  for (std::size_t l = 0; l < 3; ++l) {
    within = within && tb.C_ell[l] <= lab::frozen::C_ell[l] * slack;
    cl.push_back({{"ell", l}, {"measured", tb.C_ell[l]}, {"frozen", lab::frozen::C_ell[l]}});
  }
  ctx.write_json("calculus.json", {{"schema", "pevo.calculus/1"},
                                   {"pinned_corpus", pinned},
                                   {"C_cv", {{"measured", cv.C_cv}, {"frozen", lab::frozen::C_cv}}},
                                   {"C_ell", cl},
                                   {"slack", lab::frozen::kFrozenSlack},
                                   {"within_frozen", within}});
  // an unpinned corpus is reported, not judged against the frozen values
  if (pinned && !within) throw Error("calculus-tests: a measured constant exceeds its frozen value");
  return kExitOk;
}

int cmd_dump_symbol(const RunConfig& cfg, Context& ctx) {
  auto model = std::make_shared<const coefficients::CoefficientModel>(
      coefficients::make_family(resolved(cfg.family, cfg.family_table)));
  const bool asym = cfg.symbol.regime == "asymptotic";
  symbols::LocalizerParams par;
  par.x_k = cfg.plan.x_center;
  par.rho = cfg.symbol.rho;
  par.a = asym ? cfg.plan.a : cfg.plan.a_eff;
  par.mu = asym ? cfg.plan.mu : cfg.plan.mu_eff;
  par.s = std::max(cfg.symbol.alpha + cfg.symbol.beta, 0);
  par.regime = asym ? symbols::Regime::asymptotic : symbols::Regime::scaled;
  symbols::LocalizerFamily fam(model, std::make_shared<const symbols::SmoothCutoff>(), par);
  const auto sym = fam.symbol(cfg.symbol.alpha, cfg.symbol.beta, cfg.symbol.t);
  const auto xs = fam.x_support(cfg.symbol.t);
  const auto ks = fam.xi_support();
  Csv csv(ctx.path(prefix(cfg.family) + "_symbol_" + std::to_string(cfg.symbol.alpha) + "_" +
                   std::to_string(cfg.symbol.beta) + ".csv"),
          ctx.header() + "# regime " + cfg.symbol.regime + ", n " + fmt(fam.n()) + ", t " + fmt(cfg.symbol.t) + "\n",
          {"x", "xi", "re", "im"});
  for (int i = 0; i < cfg.symbol.nx; ++i) {
    const double x = xs.lo + (xs.hi - xs.lo) * i / (cfg.symbol.nx - 1);
    for (int j = 0; j < cfg.symbol.nxi; ++j) {
      const double xi = ks.lo + (ks.hi - ks.lo) * j / (cfg.symbol.nxi - 1);
      const auto v = sym(x, xi);
      csv.row({fmt(x), fmt(xi), fmt(v.real()), fmt(v.imag())});
    }
  }
  return kExitOk;
}

}  // namespace

std::string header_rows(const RunConfig& cfg) {
  return "# config_hash=" + config_hash(cfg) + "\n# seed=" + std::to_string(cfg.seed) + "\n";
}

void emit_plotdata(const std::vector<lab::GrowthRecord>& records, PlotKind kind, const std::string& path,
                   const std::string& header, const lab::FitLine& fit, bool fit_log_rho) {
  if (kind == PlotKind::condition_profile) throw MisuseError("emit_plotdata: condition-profile takes a ConditionReport");
  if (kind == PlotKind::growth_curve) {
    Csv csv(path, header, {"k", "t", "sigma", "log_sigma"});
    for (const auto& r : records) {
      if (!r.ok()) continue;
      for (std::size_t c = 0; c < r.t.size(); ++c)
        csv.row({std::to_string(r.k), fmt(r.t[c]), fmt(std::exp(r.log_sigma[c])), fmt(r.log_sigma[c])});
    }
    return;
  }
  const std::string line = std::string("# fit: log_sigma_end = intercept + slope * ") +
                           (fit_log_rho ? "log(rho_k)" : "rho_k") + ", slope " + fmt(fit.slope) + ", intercept " +
                           fmt(fit.intercept) + "\n";
  Csv csv(path, header + line, {"rho_k", "log_sigma_end", "fit_value", "residual"});
  for (const auto& r : records) {
    if (!r.ok()) continue;
    const double y = r.log_sigma.back();
    const double f = fit.intercept + fit.slope * (fit_log_rho ? std::log(r.rho) : r.rho);
    csv.row({fmt(r.rho), fmt(y), fmt(f), fmt(y - f)});
  }
}

void emit_plotdata(const coefficients::ConditionReport& report, const std::string& path, const std::string& header) {
  Csv csv(path, header, {"rho", "sup_integral", "M_log_bound"});
  for (std::size_t i = 0; i < report.rho_grid.size(); ++i)
    csv.row({fmt(report.rho_grid[i]), fmt(report.sup_integrals[i]), fmt(report.bound_values[i])});
}

RunResult run(const RunConfig& cfg, std::ostream& log) {
  RunResult res;
  try {
    cfg.validate();
    if (cfg.command == "print-defaults") {
      log << canonical(RunConfig{});
      return res;
    }
    Context ctx(cfg, log, res);
    if (cfg.command == "check-condition") res.exit_code = cmd_check_condition(cfg, ctx);
    else if (cfg.command == "lemma1") res.exit_code = cmd_lemma1(cfg, ctx);
    else if (cfg.command == "solve") res.exit_code = cmd_solve(cfg, ctx);
    else if (cfg.command == "dichotomy") res.exit_code = cmd_dichotomy(cfg, ctx);
    else if (cfg.command == "calculus-tests") res.exit_code = cmd_calculus(cfg, ctx);
    else if (cfg.command == "dump-symbol") res.exit_code = cmd_dump_symbol(cfg, ctx);
  } catch (const std::exception& e) {
    res.exit_code = kExitError;
    res.message = e.what();
  }
  return res;
}

}  // namespace pevo::cli

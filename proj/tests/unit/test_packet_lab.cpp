#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "pevo/coefficients/families.hpp"
#include "pevo/common/errors.hpp"
#include "pevo/lab/calibration.hpp"
#include "pevo/lab/experiment.hpp"
#include "pevo/lab/frozen.hpp"
#include "pevo/solver/cauchy.hpp"
#include "pevo/symbols/packet.hpp"

using namespace pevo;
using namespace pevo::lab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ExperimentPlan plan_for(const std::string& family, double c = 1.0) {
  ExperimentPlan p;
  p.family.name = family;
  p.family.c = c;
  return p;
}

GrowthRecord synthetic(double rho, double growth) {
  GrowthRecord r;
  r.rho = rho;
  r.n = std::pow(rho, 2.2);
  r.t = {0.0, rho / r.n};
  r.log_sigma = {0.0, growth};
  return r;
}

}  // namespace

TEST_CASE("index set ordering") {
  const auto s0 = index_set(0);
  REQUIRE(s0.size() == 1);
  CHECK(s0[0] == std::pair<int, int>{0, 0});
  const auto s2 = index_set(2);
  const std::vector<std::pair<int, int>> want = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  CHECK(s2 == want);
  CHECK(index_set(4).size() == 15);
}

TEST_CASE("log sigma arithmetic") {
  // s = 0: sigma is the single norm
  CHECK(log_sigma({0.7}, index_set(0), 0.3) == doctest::Approx(0.7));
  // s = 1, unit norms: 1 + w + w over (0,0), (1,0), (0,1)
  const double w = 0.4;
  CHECK(log_sigma({0.0, 0.0, 0.0}, index_set(1), w) == doctest::Approx(std::log(1 + 2 * w)).epsilon(1e-14));
  // weights fall geometrically with alpha + beta
  const auto idx = index_set(2);
  std::vector<double> ln(idx.size(), -kInf);
  ln[3] = 0.0;  // (2,0)
  CHECK(log_sigma(ln, idx, w) == doctest::Approx(2 * std::log(w)).epsilon(1e-14));
  CHECK(log_sigma(std::vector<double>(idx.size(), -kInf), idx, w) == -kInf);
}

TEST_CASE("B_k integral closed forms") {
  const double rho = 8, n = std::pow(rho, 2.2), A = 0.7;
  const auto zero = coefficients::make_family({});
  for (double t : {0.0, 0.3 * rho / n, rho / n})
    CHECK(bk_integral(zero, 0.0, rho, n, A, t) == doctest::Approx(-A * (1 + n / rho) * t).epsilon(1e-12));
  coefficients::FamilySpec cs;
  cs.name = "constant_imag";
  cs.c = 0.25;
  const auto cst = coefficients::make_family(cs);
  const double tk = rho / n;
  CHECK(bk_integral(cst, 3.0, rho, n, A, tk) == doctest::Approx(0.25 * rho - A * (1 + n / rho) * tk).epsilon(1e-12));
  CHECK(bk_integral(cst, 3.0, rho, n, 0.0, tk) == doctest::Approx(0.25 * rho).epsilon(1e-12));
  // decaying family: the trajectory integral at x_k = 0 is bounded by the full-line integral pi
  coefficients::FamilySpec ds;
  ds.name = "decaying_imag";
  const auto dec = coefficients::make_family(ds);
  const double b = bk_integral(dec, 0.0, rho, n, 0.0, tk);
  CHECK(b > 0);
  CHECK(b < std::numbers::pi / 2);
  CHECK_THROWS_AS(bk_integral(dec, 0.0, rho, n, 0.0, 2.0), DomainError);
}

TEST_CASE("localized packet at t = 0 matches the closed form") {
  // at t = 0 the frequency factor h^{(beta)} sits on its plateau over the packet spectrum, so
  // v^{alpha,0} = rho^{1/2} h^{(alpha)}(rho (x - x_k)) g and v^{alpha,beta>0} = 0
  auto model = std::make_shared<const coefficients::CoefficientModel>(coefficients::make_family({}));
  auto cut = std::make_shared<const symbols::SmoothCutoff>();
  const double rho = 4, n = std::pow(rho, 2.2);
  auto grid = psdo::SymbolGrid2D::for_frequency(400.0, 2 * n).share();
  const auto profile = symbols::build_packet_profile(cut, *grid);
  const auto g = solver::build_wavepacket(profile, 0.0, n, grid, 1.0 / 3.0);
  symbols::LocalizerParams par;
  par.rho = rho;
  par.a = 2.2;
  par.mu = 1.1;
  par.s = 2;
  par.regime = symbols::Regime::scaled;
  symbols::LocalizerFamily fam(model, cut, par);
  const auto idx = index_set(2);
  LocalProfile prof;
  const auto ln = localize_solution(fam, g, idx, &prof);
  for (std::size_t q = 0; q < idx.size(); ++q) {
    const auto [al, be] = idx[q];
    if (be > 0) {
      CHECK(ln[q] == -kInf);
      continue;
    }
    // rho int h^{(alpha)}(rho y)^2 psi(y)^2 dy by Simpson
    const int m = 4000;
    const double a = -0.5 / rho, hstep = 1.0 / (rho * m);
    double s = 0;
    for (int i = 0; i <= m; ++i) {
      const double y = a + hstep * i;
      const double f = std::pow(cut->derivative(al, rho * y) * profile.psi(y), 2);
      s += f * (i == 0 || i == m ? 1 : (i % 2 ? 4 : 2));
    }
    const double want = 0.5 * std::log(rho * s * hstep / 3);
    CHECK(ln[q] == doctest::Approx(want).epsilon(1e-8));
  }
  // D v ~ n v for a frequency-n packet
  double m0 = 0, m1 = 0;
  for (std::size_t j = 0; j < prof.v.size(); ++j) {
    m0 += std::norm(prof.v[j]);
    m1 += std::norm(prof.dv[j]);
  }
  CHECK(std::sqrt(m1 / m0) / n == doctest::Approx(1.0).epsilon(0.35));
  CHECK_THROWS_AS(localize_solution(fam, g, {{1, 0}}, &prof), DomainError);
  CHECK_THROWS_AS(localize_solution(fam, g, {{13, 0}}), OrderError);
}

TEST_CASE("zero family run: invariants of the record") {
  auto plan = plan_for("zero");
  plan.rhos = {4, 8};
  const auto res = run_dichotomy_experiment(plan);
  CHECK(res.verdict == "holds");
  REQUIRE(res.records.size() == 2);
  auto cut = symbols::SmoothCutoff();
  for (const auto& r : res.records) {
    REQUIRE(r.ok());
    CHECK(r.indices.size() == index_set(plan.s_eff()).size());
    CHECK(std::exp(r.log_sigma.front()) >= cut.l2_norm() - 1e-3);
    CHECK(r.sigma0_floor == doctest::Approx(cut.l2_norm()));
    CHECK(r.weight == doctest::Approx(std::pow(r.rho, plan.mu_eff + 1 - plan.a_eff)));
    CHECK(r.tail_weight == doctest::Approx(std::pow(r.weight, plan.s_eff() + 1)));
    CHECK(r.max_wrap_fraction < 1e-6);
    for (double b : r.bk) CHECK(b <= 0.0);
    // v^{0,0} rides the Hamiltonian flow; its frequency stays near n
    for (double d : r.drift_error) CHECK(d < 1.0 / r.rho);
    for (double d1 : r.d1_ratio) CHECK(d1 <= frozen::c1 * (1 + frozen::kFrozenSlack));
  }
}

TEST_CASE("constant imaginary part amplifies by exactly e^{c rho} relative to the zero family") {
  // the x-independent multiplier e^{c t xi} commutes with every localizer; with |xi - n| < 1/4 on the
  // packet spectrum the ratio of localized norms lies within e^{c rho (1 +- 1/(4n))}
  auto pz = plan_for("zero");
  auto pc = plan_for("constant_imag", 0.25);
  pz.rhos = pc.rhos = {4, 8};
  const auto z = run_dichotomy_experiment(pz);
  const auto c = run_dichotomy_experiment(pc);
  CHECK(c.verdict == "violated");
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& rz = z.records[i];
    const auto& rc = c.records[i];
    REQUIRE(rc.ok());
    CHECK(rc.log_sigma.front() == doctest::Approx(rz.log_sigma.front()).epsilon(1e-12));
    const double want = 0.25 * rc.rho;
    CHECK(std::abs(rc.log_growth() - rz.log_growth() - want) <= want / (4 * rc.n));
    for (std::size_t q = 0; q < rc.indices.size(); ++q) {
      if (!std::isfinite(rz.index_log_growth(q))) continue;
      CHECK(std::abs(rc.index_log_growth(q) - rz.index_log_growth(q) - want) <= want / (4 * rc.n));
    }
  }
}

TEST_CASE("fits and separation test on synthetic data") {
  const auto f = fit_line({1, 2, 3}, {3, 5, 7});
  CHECK(f.slope == doctest::Approx(2));
  CHECK(f.intercept == doctest::Approx(1));
  CHECK(f.rss < 1e-20);
  DichotomyResult a, b;
  for (double rho : {4.0, 8.0, 16.0}) {
    a.records.push_back(synthetic(rho, 0.25 * rho));
    b.records.push_back(synthetic(rho, 0.3 + 0.01 * (rho == 8.0)));
  }
  const auto st = separation_test(a, b);
  CHECK(st.first.slope == doctest::Approx(0.25));
  CHECK(st.rss1 < st.rss0);
  CHECK(st.lr > 1e6);
  const auto same = separation_test(a, a);
  CHECK(same.lr == doctest::Approx(1.0));
  DichotomyResult one;
  one.records.push_back(synthetic(4, 1));
  CHECK_THROWS_AS(separation_test(one, a), DegenerateError);
}

TEST_CASE("noise floor A_s from synthetic records") {
  DichotomyResult z;
  z.p = 2;
  auto r = synthetic(4, -0.5);
  z.records.push_back(r);
  const double want = 0.5 / ((1 + r.n / r.rho) * r.t[1]);
  CHECK(measure_noise_floor_As(z) == doctest::Approx(want));
}

TEST_CASE("plan validation and resource limits") {
  auto p = plan_for("zero");
  p.rhos = {8, 4};
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = plan_for("zero");
  p.checkpoint_fractions = {0.5, 1.0};
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = plan_for("zero");
  p.A_s = -1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  // the required s at the asymptotic exponents exceeds the cap
  p = plan_for("zero");
  CHECK(p.required_s(0) > p.s_cap);
  CHECK(p.s_eff() == p.s_cap);
  // grid too large for the largest rho: that point records the error, the rest complete
  p.max_N = std::size_t{1} << 17;
  const auto res = run_dichotomy_experiment(p);
  REQUIRE(res.records.size() == 3);
  CHECK(res.records[0].ok());
  CHECK(res.records[1].ok());
  CHECK_FALSE(res.records[2].ok());
  CHECK(res.records[2].error.find("exceeds") != std::string::npos);
}

TEST_CASE("parallel workers reproduce the sequential records") {
  auto p = plan_for("decaying_imag");
  p.rhos = {4, 8};
  const auto a = run_dichotomy_experiment(p);
  p.parallel = 2;
  const auto b = run_dichotomy_experiment(p);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].log_sigma == b.records[i].log_sigma);
    CHECK(a.records[i].log_norms == b.records[i].log_norms);
  }
}

TEST_CASE("frozen regression constants") {
  const auto cv = calibrate_cv();
  CHECK(cv.cases.size() == 3);
  CHECK(cv.C_cv <= frozen::C_cv * (1 + frozen::kFrozenSlack));
  CHECK(cv.C_cv >= frozen::C_cv * (1 - frozen::kFrozenSlack));
  CHECK(measure_c1(plan_for("zero")) == doctest::Approx(frozen::c1).epsilon(frozen::kFrozenSlack));
  const auto z = run_dichotomy_experiment(plan_for("zero"));
  CHECK(measure_noise_floor_As(z) == doctest::Approx(frozen::A_s).epsilon(frozen::kFrozenSlack));
}

TEST_CASE("Theorem B constants stay below the frozen values") {
  const auto tb = calibrate_theorem_b();
  for (std::size_t l = 0; l < 3; ++l) CHECK(tb.C_ell[l] <= frozen::C_ell[l] * (1 + frozen::kFrozenSlack));
  for (const auto& c : tb.cases) CHECK(c.report.ratio > 0);
}

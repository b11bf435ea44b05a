#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pevo/coefficients/families.hpp"
#include "pevo/common/errors.hpp"
#include "pevo/psdo/compose.hpp"
#include "pevo/psdo/field.hpp"
#include "pevo/psdo/grid.hpp"
#include "pevo/psdo/harness.hpp"
#include "pevo/psdo/quantize.hpp"
#include "pevo/symbols/localizer.hpp"

using namespace pevo;
using namespace pevo::psdo;
using symbols::Symbol;

namespace {

constexpr double kPi = std::numbers::pi;

double rel_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

// a(x) = 1 + 0.3 cos(3 pi x / L) + 0.2 sin(5 pi x / L): periodic and band-limited
Symbol trig_coefficient(double L) {
  const double k1 = 3 * kPi / L, k2 = 5 * kPi / L;
  return Symbol::of_x([=](int d, double x) -> cplx {
    const double c1 = std::pow(k1, d), c2 = std::pow(k2, d);
    const double ph = d * kPi / 2;
    return (d == 0 ? 1.0 : 0.0) + 0.3 * c1 * std::cos(k1 * x + ph) + 0.2 * c2 * std::sin(k2 * x + ph);
  }, 40);
}

Symbol xi_power(int d) {
  return Symbol::of_xi([d](int k, double xi) -> cplx {
    if (k > d) return 0.0;
    double c = 1;
    for (int i = 0; i < k; ++i) c *= d - i;
    return c * std::pow(xi, d - k);
  }, 40);
}

}  // namespace

TEST_CASE("grid transforms: round trip, Parseval, phase") {
  auto g = SymbolGrid2D(20.0, 4096).share();
  const auto probes = make_probe_corpus(g, 5, 11);
  for (const auto& u : probes) {
    CHECK(rel_diff(g->inverse(g->forward(u.values())), u.values()) < 1e-12);
    CHECK(std::abs(u.norm() - u.spectral_norm()) < 1e-10 * u.norm());
  }
  for (std::size_t j : {0ul, 17ul, 4095ul})
    for (std::size_t i : {0ul, 2048ul, 3000ul})
      CHECK(std::abs(g->phase(j, i) - std::exp(cplx(0, g->x(j) * g->xi(i)))) < 1e-9);
}

TEST_CASE("forward transform of a Gaussian matches the continuous transform") {
  auto g = SymbolGrid2D(30.0, 1024).share();
  std::vector<cplx> u(g->N());
  for (std::size_t j = 0; j < g->N(); ++j) u[j] = std::exp(-0.5 * g->x(j) * g->x(j));
  FieldState f(g, u);
  for (std::size_t i = 0; i < g->N(); i += 7) {
    const double xi = g->xi(i);
    CHECK(std::abs(f.spectrum()[i] - std::sqrt(2 * kPi) * std::exp(-0.5 * xi * xi)) < 1e-12);
  }
}

TEST_CASE("quantization identities") {
  auto g = SymbolGrid2D(20.0, 4096).share();
  const auto probes = make_probe_corpus(g, 4, 3);
  for (const auto& u : probes) {
    CHECK(rel_diff(quantize_apply(Symbol::constant(1.0), u).values(), u.values()) < 1e-12);
    // x-only symbol acts pointwise
    const auto a = trig_coefficient(20.0);
    std::vector<cplx> expect(g->N());
    for (std::size_t j = 0; j < g->N(); ++j) expect[j] = a(g->x(j), 0) * u.values()[j];
    CHECK(rel_diff(quantize_apply(a, u).values(), expect) < 1e-12);
  }
  // xi acts on a grid plane wave as multiplication by its frequency
  const std::size_t i0 = g->N() / 2 + 300;
  const double nu = g->xi(i0);
  std::vector<cplx> w(g->N());
  for (std::size_t j = 0; j < g->N(); ++j) w[j] = std::exp(cplx(0, nu * g->x(j)));
  FieldState e(g, w);
  const auto v = quantize_apply(xi_power(1), e);
  for (std::size_t j = 0; j < g->N(); j += 97) CHECK(std::abs(v.values()[j] - nu * w[j]) < 1e-12 * nu);
}

TEST_CASE("general quantization agrees with the pointwise and multiplier paths") {
  auto g = SymbolGrid2D(20.0, 512).share();
  const auto a = trig_coefficient(20.0);
  const auto m = xi_power(2);
  // wrap the product so the general path is taken
  const Symbol prod = Symbol::product(a, m);
  const auto probes = make_probe_corpus(g, 3, 5);
  for (const auto& u : probes) {
    const auto direct = quantize_apply(prod, u);
    const auto staged = quantize_apply(a, quantize_apply(m, u));
    CHECK(rel_diff(direct.values(), staged.values()) < 1e-12);
  }
}

TEST_CASE("quantization is linear in u and in the symbol") {
  auto g = SymbolGrid2D(20.0, 512).share();
  const auto probes = make_probe_corpus(g, 2, 9);
  const Symbol p = Symbol::product(trig_coefficient(20.0), xi_power(1));
  const Symbol q = Symbol::product(Symbol::of_x([](int d, double x) -> cplx { return d == 0 ? std::cos(kPi * x / 10) : 0.0; }, 0), xi_power(2));
  const cplx c1(0.3, -1.2), c2(2.0, 0.5);
  std::vector<cplx> mix(g->N());
  for (std::size_t j = 0; j < g->N(); ++j) mix[j] = c1 * probes[0].values()[j] + c2 * probes[1].values()[j];
  const auto lhs = quantize_apply(p, FieldState(g, mix));
  const auto r0 = quantize_apply(p, probes[0]), r1 = quantize_apply(p, probes[1]);
  std::vector<cplx> rhs(g->N());
  for (std::size_t j = 0; j < g->N(); ++j) rhs[j] = c1 * r0.values()[j] + c2 * r1.values()[j];
  CHECK(rel_diff(lhs.values(), rhs) < 1e-12);

  const auto s = quantize_apply(Symbol::sum(Symbol::scaled(p, c1), Symbol::scaled(q, c2)), probes[0]);
  const auto sp = quantize_apply(p, probes[0]), sq = quantize_apply(q, probes[0]);
  std::vector<cplx> srhs(g->N());
  for (std::size_t j = 0; j < g->N(); ++j) srhs[j] = c1 * sp.values()[j] + c2 * sq.values()[j];
  CHECK(rel_diff(s.values(), srhs) < 1e-12);
}

TEST_CASE("aliasing is flagged") {
  auto g = SymbolGrid2D(20.0, 256).share();
  std::vector<cplx> w(g->N());
  for (std::size_t j = 0; j < g->N(); ++j) w[j] = std::exp(cplx(0, g->xi(250) * g->x(j)));
  CHECK_THROWS_AS(quantize_apply(Symbol::constant(1.0), FieldState(g, w)), AliasingError);
}

TEST_CASE("dense matrix reproduces quantize_apply") {
  auto g = SymbolGrid2D(10.0, 128).share();
  const Symbol p = Symbol::product(trig_coefficient(10.0), xi_power(2));
  const auto M = dense_matrix(p, *g);
  const auto u = make_probe_corpus(g, 1, 2)[0];
  Eigen::VectorXcd uv = Eigen::Map<const Eigen::VectorXcd>(u.values().data(), static_cast<Eigen::Index>(g->N()));
  Eigen::VectorXcd v = M * uv;
  const auto q = quantize_apply(p, u);
  CHECK(rel_diff(std::vector<cplx>(v.data(), v.data() + v.size()), q.values()) < 1e-12);
}

TEST_CASE("composition expansion: closed forms") {
  const auto a = trig_coefficient(20.0);
  SUBCASE("p1 = xi") {
    const auto c = compose_expansion(xi_power(1), a, 2);
    for (double x : {-3.0, 0.5})
      for (double xi : {-2.0, 7.0}) {
        const cplx expect = a(x, xi) * xi + cplx(0, -1) * a.derivative(0, 1, x, xi);
        CHECK(std::abs(c(x, xi) - expect) < 1e-13);
      }
  }
  SUBCASE("p1 = xi^2") {
    const auto c = compose_expansion(xi_power(2), a, 3);
    for (double x : {-3.0, 0.5})
      for (double xi : {-2.0, 7.0}) {
        const cplx Da = cplx(0, -1) * a.derivative(0, 1, x, xi);
        const cplx D2a = -a.derivative(0, 2, x, xi);
        CHECK(std::abs(c(x, xi) - (a(x, xi) * xi * xi + 2.0 * Da * xi + D2a)) < 1e-12);
      }
  }
  SUBCASE("p1 = 1") {
    for (int nu = 1; nu <= 4; ++nu) {
      const auto c = compose_expansion(Symbol::constant(1.0), a, nu);
      CHECK(std::abs(c(1.3, 2.0) - a(1.3, 2.0)) == 0.0);
    }
  }
  CHECK_THROWS_AS(compose_expansion(Symbol::of_xi([](int, double) -> cplx { return 1.0; }, 1), a, 3), OrderError);
}

TEST_CASE("polynomial symbols: truncation at nu = d+1 matches the dense operator product") {
  auto g = SymbolGrid2D(20.0, 256).share();
  const auto a = trig_coefficient(20.0);
  const auto probes = make_probe_corpus(g, 6, 21);
  for (int d = 1; d <= 3; ++d) {
    const auto p1 = xi_power(d);
    const Eigen::MatrixXcd P = dense_matrix(p1, *g) * dense_matrix(a, *g);
    const auto Mc = dense_matrix(compose_expansion(p1, a, d + 1), *g);
    double worst = 0;
    for (const auto& u : probes) {
      Eigen::VectorXcd uv = Eigen::Map<const Eigen::VectorXcd>(u.values().data(), 256);
      const double scale = std::pow(g->xi_max(), d);
      worst = std::max(worst, ((P - Mc) * uv).norm() / (uv.norm() * scale));
    }
    CHECK(worst < 1e-8);
    CHECK(composition_remainder_norm(p1, a, d + 1, probes) < 1e-8 * std::pow(g->xi_max(), d));
  }
}

TEST_CASE("composition remainder vanishes for p1 = 1") {
  auto g = SymbolGrid2D(20.0, 256).share();
  const auto probes = make_probe_corpus(g, 3, 4);
  for (int nu = 1; nu <= 4; ++nu)
    CHECK(composition_remainder_norm(Symbol::constant(1.0), trig_coefficient(20.0), nu, probes) < 1e-14);
}

TEST_CASE("remainder decays with nu for an overlapping smooth pair") {
  auto g = SymbolGrid2D(20.0, 512).share();
  const double s = 2.0;
  const Symbol p1 = Symbol::of_xi([s](int k, double xi) -> cplx {
    // derivatives of exp(-xi^2 / (2 s^2)) via Hermite polynomials
    const double z = xi / s;
    double h0 = 1, h1 = z;
    double hk = k == 0 ? h0 : h1;
    for (int i = 1; i < k; ++i) {
      const double h2 = z * h1 - i * h0;
      h0 = h1;
      h1 = h2;
      hk = h2;
    }
    return ((k % 2) ? -1.0 : 1.0) * hk * std::pow(s, -k) * std::exp(-0.5 * z * z);
  }, 20);
  const auto probes = make_probe_corpus(g, 8, 8, {-10, 10});
  double prev = composition_remainder_norm(p1, trig_coefficient(20.0), 1, probes);
  for (int nu = 2; nu <= 4; ++nu) {
    const double r = composition_remainder_norm(p1, trig_coefficient(20.0), nu, probes);
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("disjoint chi/w pair: every expansion term vanishes, remainder is the full product") {
  auto cut = std::make_shared<const symbols::SmoothCutoff>();
  coefficients::FamilySpec fs;
  auto model = std::make_shared<const coefficients::CoefficientModel>(coefficients::make_family(fs));
  symbols::LocalizerParams par;
  par.rho = 4;
  par.a = 2.2;
  par.mu = 1.1;
  par.regime = symbols::Regime::scaled;
  symbols::LocalizerFamily fam(model, cut, par);
  auto g = SymbolGrid2D(60.0, 2048).share();
  const auto w = fam.symbol(0, 0, 0.0);
  const auto chi = fam.one_minus_chi1_symbol();
  const auto probes = make_probe_corpus(g, 6, 77, {fam.n() - 8, fam.n() + 8});
  const double prod = product_norm(chi, w, probes);
  double prev = 1e300;
  for (int nu = 1; nu <= 4; ++nu) {
    const auto c = compose_expansion(chi, w, nu);
    CHECK(c(fam.x_k(), fam.n()) == 0.0);
    const double r = composition_remainder_norm(chi, w, nu, probes);
    CHECK(r == doctest::Approx(prod).epsilon(1e-12));
    CHECK(r <= prev);
    prev = r;
  }
}

TEST_CASE("Calderon-Vaillancourt harness") {
  auto g = SymbolGrid2D(20.0, 1024).share();
  const auto probes = make_probe_corpus(g, 30, 2024);
  symbols::GridSample smp{{-20, 20}, {-g->xi_max(), g->xi_max()}, 101, 101};
  const auto r = cv_bound_harness(Symbol::constant(1.0), probes, smp, 2024);
  CHECK(r.max_op_ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.seminorm == 1.0);
  CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.probes == 30);
  // nonzero on the grid, but invisible to a sample window away from its support
  const auto bump = Symbol::of_xi([](int k, double xi) -> cplx { return k == 0 ? std::exp(-(xi - 30) * (xi - 30)) : 0.0; }, 2, {28, 32});
  const symbols::GridSample narrow{{-20, 20}, {-1, 1}, 11, 11};
  const auto hi = make_probe_corpus(g, 30, 5, {25, 35});
  CHECK_THROWS_AS(cv_bound_harness(bump, hi, narrow), DegenerateError);
}

TEST_CASE("oscillatory product at theta = 0 is the plain product") {
  SymbolGrid2D g(10.0, 256);
  const auto a = trig_coefficient(10.0);
  const auto b = Symbol::product(xi_power(1), Symbol::of_x([](int d, double x) -> cplx { return d == 0 ? std::cos(kPi * x / 5) : 0.0; }, 0));
  const auto P = oscillatory_product(b, a, 0.0, g, 100, 150);
  for (Eigen::Index j = 0; j < P.rows(); j += 13)
    for (Eigen::Index c = 0; c < P.cols(); c += 7) {
      const double x = g.x(static_cast<std::size_t>(j)), xi = g.xi(100 + static_cast<std::size_t>(c));
      CHECK(std::abs(P(j, c) - b(x, xi) * a(x, xi)) < 1e-10);
    }
}

TEST_CASE("probe corpus is reproducible and band-limited") {
  auto g = SymbolGrid2D(20.0, 512).share();
  const auto a = make_probe_corpus(g, 4, 99), b = make_probe_corpus(g, 4, 99);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].values() == b[i].values());
    CHECK(a[i].high_band_fraction(1.0 / 3.0) == 0.0);
  }
}

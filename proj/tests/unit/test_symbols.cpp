#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "pevo/coefficients/families.hpp"
#include "pevo/common/errors.hpp"
#include "pevo/psdo/grid.hpp"
#include "pevo/symbols/cutoff.hpp"
#include "pevo/symbols/localizer.hpp"
#include "pevo/symbols/packet.hpp"
#include "pevo/symbols/seminorm.hpp"
#include "pevo/symbols/symbol.hpp"

using namespace pevo;
using namespace pevo::symbols;

namespace {

std::shared_ptr<const SmoothCutoff> cutoff() {
  static auto c = std::make_shared<const SmoothCutoff>();
  return c;
}

std::shared_ptr<const coefficients::CoefficientModel> model(double ap1 = 0.0) {
  coefficients::FamilySpec s;
  s.name = "zero";
  s.ap1 = ap1;
  return std::make_shared<const coefficients::CoefficientModel>(coefficients::make_family(s));
}

}  // namespace

TEST_CASE("cutoff plateau, support and symmetry") {
  const auto& h = *cutoff();
  for (double y : {0.0, 0.1, 0.2, 0.25, -0.25}) CHECK(h(y) == 1.0);
  for (double y : {0.5, 0.6, -0.5, 3.0}) CHECK(h(y) == 0.0);
  for (double y : {0.3, 0.37, 0.45}) {
    CHECK(h(y) > 0.0);
    CHECK(h(y) < 1.0);
    CHECK(h(y) == h(-y));
  }
  CHECK(h(0.375) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("cutoff derivatives match finite differences") {
  const auto& h = *cutoff();
  for (double y : {-0.44, -0.31, 0.27, 0.33, 0.41, 0.48})
    for (int k = 1; k <= 8; ++k) {
      const double e = 1e-5;
      const double fd = (h.derivative(k - 1, y + e) - h.derivative(k - 1, y - e)) / (2 * e);
      const double ex = h.derivative(k, y);
      CHECK(std::abs(fd - ex) < 1e-6 * (1 + std::abs(ex)) * std::pow(20.0, k));
    }
  std::array<double, 7> d{};
  h.derivatives(0.33, d);
  for (int k = 0; k < 7; ++k) CHECK(d[k] == doctest::Approx(h.derivative(k, 0.33)).epsilon(1e-14));
}

TEST_CASE("cutoff derivative order is bounded") {
  CHECK_THROWS_AS(cutoff()->derivative(13, 0.3), OrderError);
}

TEST_CASE("cutoff integral and L2 norm") {
  const auto& h = *cutoff();
  // h is symmetric about its half-height point, so int h = 2 * 0.375
  CHECK(h.integral() == doctest::Approx(0.75).epsilon(1e-10));
  double s = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double y = -0.5 + (i + 0.5) / n;
    s += h(y) * h(y) / n;
  }
  CHECK(h.l2_norm() == doctest::Approx(std::sqrt(s)).epsilon(1e-8));
}

TEST_CASE("packet profile: psi(0) = 2 and Plancherel") {
  PacketProfile prof(cutoff());
  CHECK(prof.psi(0.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(prof.psi_hat(0.3) == 0.0);
  CHECK(prof.psi_hat(0.1) == doctest::Approx(prof.kappa()));
  // spatial L2 norm by direct quadrature over a long window
  double s = 0.0;
  const double dx = 2.0;  // |psi|^2 is band-limited to |xi| <= 1/2, so the trapezoid sum is exact
  for (double x = -4000; x <= 4000; x += dx) s += prof.psi(x) * prof.psi(x) * dx;
  CHECK(std::sqrt(s) == doctest::Approx(prof.l2_norm()).epsilon(1e-6));
}

TEST_CASE("packet profile rejects coarse frequency grids") {
  CHECK_THROWS_AS(build_packet_profile(cutoff(), psdo::SymbolGrid2D(10.0, 256)), ResolutionError);
  CHECK_NOTHROW(build_packet_profile(cutoff(), psdo::SymbolGrid2D(400.0, 4096)));
}

TEST_CASE("symbol product follows Leibniz") {
  const auto a = Symbol::of_x([](int k, double x) -> cplx { return std::pow(cplx(0, 1), k) * std::exp(cplx(0, x)); }, 10);
  const auto b = Symbol([](int dxi, int dx, double x, double xi) -> cplx {
    // sin(x) xi^3
    const double fx = dx % 4 == 0 ? std::sin(x) : dx % 4 == 1 ? std::cos(x) : dx % 4 == 2 ? -std::sin(x) : -std::cos(x);
    double fxi = 0;
    if (dxi <= 3) fxi = std::tgamma(4) / std::tgamma(4 - dxi) * std::pow(xi, 3 - dxi);
    return fx * fxi;
  }, 6, 6);
  const auto p = Symbol::product(a, b);
  for (double x : {-1.0, 0.4})
    for (double xi : {-0.7, 1.3})
      for (int dx = 0; dx <= 3; ++dx)
        for (int dxi = 0; dxi <= 3; ++dxi) {
          const double e = 1e-5;
          const cplx fd = (p.derivative(dxi, dx, x + e, xi) - p.derivative(dxi, dx, x - e, xi)) / (2 * e);
          CHECK(std::abs(fd - p.derivative(dxi, dx + 1, x, xi)) < 1e-6);
        }
  CHECK_THROWS_AS(p.derivative(7, 0, 0, 0), OrderError);
}

TEST_CASE("seminorm of simple symbols") {
  GridSample s{{-3, 3}, {-3, 3}, 61, 61};
  CHECK(seminorm(Symbol::constant(1.0), 2, 2, s).value == 1.0);
  // e^{ix}: every x-derivative has modulus 1
  const auto e = Symbol::of_x([](int k, double x) -> cplx { return std::pow(cplx(0, 1), k) * std::exp(cplx(0, x)); }, 4);
  CHECK(seminorm(e, 2, 2, s).value == doctest::Approx(1.0));
  // 3 xi^2 on |xi| <= 3 has max derivative value 27
  const auto q = Symbol::of_xi([](int k, double xi) -> cplx { return k == 0 ? 3 * xi * xi : k == 1 ? 6 * xi : k == 2 ? 6.0 : 0.0; }, 6);
  CHECK(seminorm(q, 2, 2, s).value == doctest::Approx(27.0));
}

TEST_CASE("localizer exponent rules") {
  CHECK_NOTHROW(LocalizerFamily::validate_exponents(5.0, 3.5, 2, Regime::asymptotic));
  CHECK_THROWS_AS(LocalizerFamily::validate_exponents(5.1, 3.5, 2, Regime::asymptotic), DomainError);
  CHECK_THROWS_AS(LocalizerFamily::validate_exponents(4.0, 2.9, 2, Regime::asymptotic), DomainError);
  CHECK_NOTHROW(LocalizerFamily::validate_exponents(2.2, 1.1, 2, Regime::scaled));
  CHECK_THROWS_AS(LocalizerFamily::validate_exponents(2.0, 1.1, 2, Regime::scaled), DomainError);
  // (5*(q+0) + 3.5 + 2.5)/(0.5) = 10q + 12
  CHECK(LocalizerFamily::required_s(5.0, 3.5, 2, 0.0) == 12);
  CHECK(LocalizerFamily::required_s(5.0, 3.5, 2, 1.0) == 22);
}

TEST_CASE("localizer derivatives agree with finite differences") {
  LocalizerParams par;
  par.x_k = 0.7;
  par.rho = 4;
  par.a = 2.2;
  par.mu = 1.1;
  par.regime = Regime::scaled;
  LocalizerFamily fam(model(0.4), cutoff(), par);
  const double n = fam.n(), t = 0.6 * fam.horizon();
  const auto xs = fam.x_support(t);
  const auto ks = fam.xi_support();
  // relative to the sup of the exact derivative over the sample, per order
  for (int dxi = 0; dxi <= 5; ++dxi) {
    double err = 0.0, sup = 0.0;
    for (int i = 1; i < 24; ++i)
      for (int j = 1; j < 24; ++j) {
        const double xi = ks.lo + ks.width() * i / 24.0;
        const double x = xs.lo + xs.width() * j / 24.0;
        const double e = 1e-6 * n / std::pow(par.rho, par.mu);
        const double fd = (fam.derivative(1, 0, dxi, 1, t, x, xi + e) - fam.derivative(1, 0, dxi, 1, t, x, xi - e)) / (2 * e);
        const double ex = fam.derivative(1, 0, dxi + 1, 1, t, x, xi);
        err = std::max(err, std::abs(fd - ex));
        sup = std::max(sup, std::abs(ex));
      }
    CHECK(sup > 0);
    CHECK(err <= 1e-5 * sup);
  }
}

TEST_CASE("localizer vanishes outside the Lemma 2 box") {
  LocalizerParams par;
  par.rho = 8;
  LocalizerFamily fam(model(0.5), cutoff(), par);
  const double tk = fam.horizon();
  for (double t : {0.0, tk / 2, tk})
    for (int al = 0; al <= 4; ++al)
      for (int be = 0; al + be <= 4; ++be) {
        const auto rep = support_check(fam, al, be, t, fam.default_sample(t, 121, 121, 2.0, 2.0));
        CHECK(rep.max_outside == 0.0);
        CHECK(rep.points_outside > 0);
        if (al + be == 0) CHECK(rep.max_inside > 0.0);
      }
}

TEST_CASE("scaled localizer vanishes outside its exact support hull") {
  LocalizerParams par;
  par.rho = 8;
  par.a = 2.2;
  par.mu = 1.1;
  par.regime = Regime::scaled;
  LocalizerFamily fam(model(0.5), cutoff(), par);
  for (double t : {0.0, fam.horizon()}) {
    const auto xs = fam.x_support(t);
    const auto ks = fam.xi_support();
    GridSample smp{{xs.lo - 1, xs.hi + 1}, {ks.lo - 5, ks.hi + 5}, 161, 161};
    double outside = 0.0;
    for (int i = 0; i < smp.nx; ++i)
      for (int k = 0; k < smp.nxi; ++k) {
        const double x = smp.x_at(i), xi = smp.xi_at(k);
        if (!xs.contains(x) || !ks.contains(xi)) outside = std::max(outside, std::abs(fam.value(1, 1, t, x, xi)));
      }
    CHECK(outside == 0.0);
  }
}

TEST_CASE("localizer is transported by the Hamiltonian flow") {
  for (double rho : {4.0, 8.0, 16.0}) {
    LocalizerParams par;
    par.rho = rho;
    LocalizerFamily fam(model(0.5), cutoff(), par);
    for (double t : {0.0, fam.horizon() / 2, fam.horizon()})
      CHECK(transport_residual(fam, t, fam.default_sample(t, 81, 81)) <= 1e-4);
  }
}

TEST_CASE("chi1 and chi2 follow the localizer geometry") {
  LocalizerParams par;
  par.rho = 4;
  LocalizerFamily fam(model(), cutoff(), par);
  const double n = fam.n();
  CHECK(fam.chi1(n) == 1.0);
  CHECK(fam.chi1(n * (1 + 0.7 / std::pow(4.0, 3.5))) == 1.0);
  CHECK(fam.chi1(n * (1 + 1.6 / std::pow(4.0, 3.5))) == 0.0);
  CHECK(fam.chi1(0.0) == 0.0);
  CHECK(fam.chi2(0.0, fam.x_k(), n) == 1.0);
  CHECK(fam.chi2(0.0, fam.x_k() + 0.5 * fam.c_p(), n) == 1.0);
  CHECK(fam.chi2(0.0, fam.x_k() + 2.0 * 2 * fam.c_p() / 4.0 + 1e-9, n) == 0.0);
}

// Pointwise constants are flat in rho. The seminorm constants are sup over (gamma, sigma) and carry
// (rho^mu/n)^gamma terms that only fade for large rho, so they are non-increasing and flat from rho = 8.
TEST_CASE("AB1 constants are stable across rho") {
  for (int al = 0; al <= 1; ++al)
    for (int be = 0; be <= 1; ++be) {
      std::vector<double> c_point, c_semi, c_weight;
      for (double rho : {4.0, 8.0, 16.0}) {
        LocalizerParams par;
        par.rho = rho;
        LocalizerFamily fam(model(), cutoff(), par);
        const double t = fam.horizon();
        const auto smp = fam.default_sample(t, 101, 101);
        c_point.push_back(ab1_pointwise_constant(fam, al, be, 2, 1, t, smp));
        c_semi.push_back(ab1_seminorm_constant(fam, al, be, 2, t, smp));
        c_weight.push_back(ab1_weighted_constant(fam, al, be, 2, 1, 1, t, smp));
      }
      for (double c : c_point) {
        CHECK(c / c_point.front() <= 2.0);
        CHECK(c / c_point.front() >= 0.5);
      }
      for (const auto* v : {&c_semi, &c_weight}) {
        CHECK((*v)[1] <= (*v)[0] * (1 + 1e-9));
        CHECK((*v)[2] <= 2 * (*v)[1]);
        CHECK((*v)[2] >= 0.5 * (*v)[1]);
      }
    }
}

#include "pevo/symbols/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pevo/common/errors.hpp"
#include "pevo/common/faa_di_bruno.hpp"

namespace pevo::symbols {

namespace {
constexpr int kUnlimited = 1 << 20;
}

Symbol::Symbol(Fn fn, int max_dxi, int max_dx, bool x_dependent, bool xi_dependent, Interval x_support,
               Interval xi_support)
    : fn_(std::move(fn)), max_dxi_(xi_dependent ? max_dxi : kUnlimited), max_dx_(x_dependent ? max_dx : kUnlimited),
      x_dependent_(x_dependent), xi_dependent_(xi_dependent), x_support_(x_support), xi_support_(xi_support) {}

cplx Symbol::derivative(int dxi, int dx, double x, double xi) const {
  if (dxi < 0 || dx < 0 || dxi > max_dxi_ || dx > max_dx_)
    throw OrderError("symbol derivative (" + std::to_string(dxi) + "," + std::to_string(dx) + ") not available");
  if ((dxi > 0 && !xi_dependent_) || (dx > 0 && !x_dependent_)) return {};
  return fn_(dxi, dx, x, xi);
}

Symbol Symbol::constant(cplx c) {
  return Symbol([c](int a, int b, double, double) { return (a == 0 && b == 0) ? c : cplx{}; }, kUnlimited,
                kUnlimited, false, false);
}

Symbol Symbol::of_xi(std::function<cplx(int, double)> f, int max_d, Interval xi_support) {
  return Symbol([f](int a, int, double, double xi) { return f(a, xi); }, max_d, kUnlimited, false, true, {},
                xi_support);
}

Symbol Symbol::of_x(std::function<cplx(int, double)> f, int max_d, Interval x_support) {
  return Symbol([f](int, int b, double x, double) { return f(b, x); }, kUnlimited, max_d, true, false, x_support,
                {});
}

Symbol Symbol::product(const Symbol& a, const Symbol& b) {
  auto fn = [a, b](int dxi, int dx, double x, double xi) {
    cplx s{};
    for (int i = 0; i <= dxi; ++i)
      for (int j = 0; j <= dx; ++j) {
        const cplx fa = a.derivative(i, j, x, xi);
        if (fa == cplx{}) continue;
        s += binomial(dxi, i) * binomial(dx, j) * fa * b.derivative(dxi - i, dx - j, x, xi);
      }
    return s;
  };
  return Symbol(fn, std::min(a.max_dxi(), b.max_dxi()), std::min(a.max_dx(), b.max_dx()),
                a.x_dependent() || b.x_dependent(), a.xi_dependent() || b.xi_dependent(),
                a.x_support().intersect(b.x_support()), a.xi_support().intersect(b.xi_support()));
}

Symbol Symbol::sum(const Symbol& a, const Symbol& b) {
  auto fn = [a, b](int dxi, int dx, double x, double xi) {
    return a.derivative(dxi, dx, x, xi) + b.derivative(dxi, dx, x, xi);
  };
  const Interval xs{std::min(a.x_support().lo, b.x_support().lo), std::max(a.x_support().hi, b.x_support().hi)};
  const Interval ks{std::min(a.xi_support().lo, b.xi_support().lo), std::max(a.xi_support().hi, b.xi_support().hi)};
  return Symbol(fn, std::min(a.max_dxi(), b.max_dxi()), std::min(a.max_dx(), b.max_dx()),
                a.x_dependent() || b.x_dependent(), a.xi_dependent() || b.xi_dependent(), xs, ks);
}

Symbol Symbol::scaled(const Symbol& a, cplx c) {
  auto fn = [a, c](int dxi, int dx, double x, double xi) { return c * a.derivative(dxi, dx, x, xi); };
  return Symbol(fn, a.max_dxi(), a.max_dx(), a.x_dependent(), a.xi_dependent(), a.x_support(), a.xi_support());
}

Symbol Symbol::xi_power_times(int h, const Symbol& p) {
  auto fn = [h, p](int dxi, int dx, double x, double xi) {
    cplx s{};
    for (int i = 0; i <= std::min(dxi, h); ++i) {
      // d^i/dxi^i xi^h
      double c = 1.0;
      for (int r = 0; r < i; ++r) c *= (h - r);
      s += binomial(dxi, i) * c * std::pow(xi, h - i) * p.derivative(dxi - i, dx, x, xi);
    }
    return s;
  };
  return Symbol(fn, p.max_dxi(), p.max_dx(), p.x_dependent(), true, p.x_support(), p.xi_support());
}

}  // namespace pevo::symbols

#pragma once

#include <complex>
#include <functional>
#include <limits>

namespace pevo::symbols {

using cplx = std::complex<double>;

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double v) const { return v >= lo && v <= hi; }
  bool bounded() const { return lo > -std::numeric_limits<double>::infinity() && hi < std::numeric_limits<double>::infinity(); }
  double width() const { return hi - lo; }
  Interval intersect(const Interval& o) const { return {lo > o.lo ? lo : o.lo, hi < o.hi ? hi : o.hi}; }
};

// Symbol p(x, xi) at a fixed time, with mixed derivative access
// d^dxi/dxi^dxi d^dx/dx^dx p. The declared supports are conservative: p vanishes
// outside x_support x xi_support.
class Symbol {
 public:
  using Fn = std::function<cplx(int dxi, int dx, double x, double xi)>;

  Symbol() = default;
  Symbol(Fn fn, int max_dxi, int max_dx, bool x_dependent = true, bool xi_dependent = true,
         Interval x_support = {}, Interval xi_support = {});

  cplx operator()(double x, double xi) const { return fn_(0, 0, x, xi); }
  cplx derivative(int dxi, int dx, double x, double xi) const;

  int max_dxi() const { return max_dxi_; }
  int max_dx() const { return max_dx_; }
  bool x_dependent() const { return x_dependent_; }
  bool xi_dependent() const { return xi_dependent_; }
  const Interval& x_support() const { return x_support_; }
  const Interval& xi_support() const { return xi_support_; }

  static Symbol constant(cplx c);
  // f(order, xi) = f^{(order)}(xi)
  static Symbol of_xi(std::function<cplx(int, double)> f, int max_d, Interval xi_support = {});
  static Symbol of_x(std::function<cplx(int, double)> f, int max_d, Interval x_support = {});
  static Symbol product(const Symbol& a, const Symbol& b);
  static Symbol sum(const Symbol& a, const Symbol& b);
  static Symbol scaled(const Symbol& a, cplx c);
  // xi^h p(x, xi)
  static Symbol xi_power_times(int h, const Symbol& p);

 private:
  Fn fn_;
  int max_dxi_ = 0, max_dx_ = 0;
  bool x_dependent_ = true, xi_dependent_ = true;
  Interval x_support_, xi_support_;
};

}  // namespace pevo::symbols

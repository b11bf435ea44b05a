#include "pevo/psdo/compose.hpp"

#include <algorithm>
#include <cmath>

#include "pevo/common/errors.hpp"
#include "pevo/common/faa_di_bruno.hpp"

namespace pevo::psdo {

using symbols::Symbol;

symbols::Symbol compose_expansion(const Symbol& p1, const Symbol& p2, int nu) {
  if (nu < 1) throw OrderError("compose_expansion: nu must be >= 1");
  if (p1.max_dxi() < nu - 1 || p2.max_dx() < nu - 1)
    throw OrderError("compose_expansion: insufficient derivative access");
  auto fn = [p1, p2, nu](int dxi, int dx, double x, double xi) {
    cplx total{};
    cplx mi{1.0, 0.0};  // (-i)^alpha
    for (int a = 0; a < nu; ++a) {
      if (a > 0 && (!p1.xi_dependent() || !p2.x_dependent())) break;
      cplx term{};
      for (int i = 0; i <= dxi; ++i)
        for (int j = 0; j <= dx; ++j) {
          const cplx f = p1.derivative(a + i, j, x, xi);
          if (f == cplx{}) continue;
          term += binomial(dxi, i) * binomial(dx, j) * f * p2.derivative(dxi - i, a + dx - j, x, xi);
        }
      total += mi / factorial(a) * term;
      mi *= cplx(0.0, -1.0);
    }
    return total;
  };
  const int max_dxi = std::min(p1.max_dxi() - (nu - 1), p2.max_dxi());
  const int max_dx = std::min(p1.max_dx(), p2.max_dx() - (nu - 1));
  return Symbol(fn, max_dxi, max_dx, p1.x_dependent() || p2.x_dependent(), p1.xi_dependent() || p2.xi_dependent(),
                p1.x_support().intersect(p2.x_support()), p1.xi_support().intersect(p2.xi_support()));
}

namespace {
double diff_norm(const FieldState& a, const FieldState& b) {
  double s = 0;
  for (std::size_t j = 0; j < a.values().size(); ++j) s += std::norm(a.values()[j] - b.values()[j]);
  return std::sqrt(a.grid().dx() * s);
}
}  // namespace

double composition_remainder_norm(const Symbol& p1, const Symbol& p2, int nu, const std::vector<FieldState>& probes,
                                  const QuantizeOptions& opts) {
  if (probes.empty()) throw DomainError("composition_remainder_norm: no probes");
  const auto c = compose_expansion(p1, p2, nu);
  QuantizeOptions inner = opts;
  inner.check_aliasing = false;
  double best = 0.0;
  for (const auto& u : probes) {
    const double nu_ = u.norm();
    if (nu_ == 0) throw DomainError("composition_remainder_norm: zero probe");
    const auto lhs = quantize_apply(p1, quantize_apply(p2, u, opts), inner);
    const auto rhs = quantize_apply(c, u, opts);
    best = std::max(best, diff_norm(lhs, rhs) / nu_);
  }
  return best;
}

double product_norm(const Symbol& p1, const Symbol& p2, const std::vector<FieldState>& probes,
                    const QuantizeOptions& opts) {
  QuantizeOptions inner = opts;
  inner.check_aliasing = false;
  double best = 0.0;
  for (const auto& u : probes)
    best = std::max(best, quantize_apply(p1, quantize_apply(p2, u, opts), inner).norm() / u.norm());
  return best;
}

}  // namespace pevo::psdo

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "pevo/common/errors.hpp"

namespace pevo {

// Cumulative integral F(y) = int_lo^y f on a uniform grid. Cells are
// integrated with Simpson's rule; between nodes F is the cubic Hermite
// interpolant built from F and f = F'.
template <class T>
class PrimitiveTable {
 public:
  PrimitiveTable() = default;

  PrimitiveTable(const std::function<T(double)>& f, double lo, double hi, std::size_t cells)
      : lo_(lo), hi_(hi), h_((hi - lo) / static_cast<double>(cells)) {
    if (!(hi > lo) || cells == 0) throw DomainError("PrimitiveTable: empty range");
    f_.resize(cells + 1);
    F_.resize(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) f_[i] = f(node(i));
    F_[0] = T{};
    for (std::size_t i = 0; i < cells; ++i) {
      const T mid = f(node(i) + 0.5 * h_);
      F_[i + 1] = F_[i] + (f_[i] + 4.0 * mid + f_[i + 1]) * (h_ / 6.0);
    }
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double step() const { return h_; }

  T operator()(double y) const {
    if (y < lo_ - 1e-12 * (1.0 + std::abs(lo_)) || y > hi_ + 1e-12 * (1.0 + std::abs(hi_)))
      throw DomainError("PrimitiveTable: argument outside tabulated range");
    const std::size_t cells = F_.size() - 1;
    double s = (y - lo_) / h_;
    std::size_t i = s <= 0 ? 0 : static_cast<std::size_t>(s);
    if (i >= cells) i = cells - 1;
    const double u = std::min(1.0, std::max(0.0, s - static_cast<double>(i)));
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
    return F_[i] * h00 + f_[i] * (h10 * h_) + F_[i + 1] * h01 + f_[i + 1] * (h11 * h_);
  }

 private:
  double node(std::size_t i) const { return lo_ + h_ * static_cast<double>(i); }

  double lo_ = 0, hi_ = 0, h_ = 0;
  std::vector<T> f_, F_;
};

}  // namespace pevo

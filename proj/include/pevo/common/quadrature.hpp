#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace pevo {

// Even number of Simpson intervals with spacing at most max_step.
inline std::size_t simpson_intervals(double width, double max_step) {
  auto n = static_cast<std::size_t>(std::ceil(std::abs(width) / max_step));
  n = std::max<std::size_t>(n, 2);
  if (n % 2) ++n;
  return n;
}

// Composite Simpson rule over [a, b] with `intervals` (even) subintervals.
template <class F>
auto simpson(F&& f, double a, double b, std::size_t intervals) {
  using R = decltype(f(a));
  if (intervals % 2) ++intervals;
  const double h = (b - a) / static_cast<double>(intervals);
  R odd{}, even{};
  for (std::size_t i = 1; i < intervals; ++i) {
    const R v = f(a + h * static_cast<double>(i));
    if (i % 2) odd += v; else even += v;
  }
  return (f(a) + f(b) + 4.0 * odd + 2.0 * even) * (h / 3.0);
}

}  // namespace pevo

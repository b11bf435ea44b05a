#include "pevo/common/faa_di_bruno.hpp"

#include <cmath>

namespace pevo {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

std::vector<std::vector<double>> bell_table(const std::vector<double>& inner, int order) {
  std::vector<std::vector<double>> B(order + 1, std::vector<double>(order + 1, 0.0));
  B[0][0] = 1.0;
  auto x = [&](int r) { return r < static_cast<int>(inner.size()) ? inner[r] : 0.0; };
  for (int m = 1; m <= order; ++m)
    for (int k = 1; k <= m; ++k) {
      double s = 0.0;
      for (int i = 1; i <= m - k + 1; ++i) s += binomial(m - 1, i - 1) * x(i) * B[m - i][k - 1];
      B[m][k] = s;
    }
  return B;
}

double faa_di_bruno(const std::vector<double>& outer, const std::vector<double>& inner, int m) {
  if (m == 0) return outer.at(0);
  const auto B = bell_table(inner, m);
  double s = 0.0;
  for (int k = 1; k <= m; ++k) s += outer.at(k) * B[m][k];
  return s;
}

}  // namespace pevo

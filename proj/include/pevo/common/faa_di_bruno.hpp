#pragma once

#include <vector>

namespace pevo {

// Partial Bell polynomials B_{m,k}(x_1, ..., x_{m-k+1}) for 0 <= k <= m <= order.
// inner[r] holds the r-th derivative of the inner function (inner[0] unused).
// Result is indexed [m][k].
std::vector<std::vector<double>> bell_table(const std::vector<double>& inner, int order);

// d^m/dy^m f(g(y)) given outer[k] = f^{(k)}(g(y)) and inner[r] = g^{(r)}(y).
double faa_di_bruno(const std::vector<double>& outer, const std::vector<double>& inner, int m);

double binomial(int n, int k);
double factorial(int n);

}  // namespace pevo

#pragma once

#include <span>
#include <vector>

namespace pevo::symbols {

// Even C-infinity cutoff: h = 1 on |y| <= 1/4, h = 0 on |y| >= 1/2,
// h(y) = G((1/2 - |y|) / (1/4)) with G(u) = g(u) / (g(u) + g(1-u)), g(u) = exp(-1/u).
class SmoothCutoff {
 public:
  explicit SmoothCutoff(int d_max = 12);

  int d_max() const { return d_max_; }
  double operator()(double y) const;
  double derivative(int order, double y) const;
  // out[k] = h^{(k)}(y) for k < out.size(); out.size() - 1 <= d_max
  void derivatives(double y, std::span<double> out) const;

  // sup over y of |h^{(k)}|, sampled once at construction
  double sup_derivative(int order) const { return sup_.at(static_cast<std::size_t>(order)); }
  double l2_norm() const { return l2_norm_; }
  double integral() const { return integral_; }

 private:
  // g^{(k)}(u) for k = 0..K
  void g_derivatives(double u, int K, double* out) const;
  // G^{(k)}(u) for k = 0..K
  void G_derivatives(double u, int K, double* out) const;

  int d_max_;
  std::vector<std::vector<double>> poly_;  // g^{(k)}(u) = P_k(1/u) g(u)
  std::vector<std::vector<double>> binom_;
  std::vector<double> sup_;
  double l2_norm_ = 0.0;
  double integral_ = 0.0;
};

}  // namespace pevo::symbols

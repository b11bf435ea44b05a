#include "pevo/symbols/cutoff.hpp"

#include <algorithm>
#include <cmath>

#include "pevo/common/errors.hpp"
#include "pevo/common/quadrature.hpp"

namespace pevo::symbols {

namespace {
constexpr int kMaxOrder = 24;
constexpr double kUnderflow = 700.0;
}

SmoothCutoff::SmoothCutoff(int d_max) : d_max_(d_max) {
  if (d_max_ < 1 || d_max_ > kMaxOrder) throw OrderError("cutoff order must lie in [1, 24]");
  // P_0 = 1, P_{k+1}(v) = v^2 (P_k(v) - P_k'(v)); coefficients by ascending power
  poly_.push_back({1.0});
  for (int k = 0; k < d_max_; ++k) {
    const auto& P = poly_.back();
    std::vector<double> Q(P.size() + 2, 0.0);
    for (std::size_t i = 0; i < P.size(); ++i) Q[i + 2] += P[i];
    for (std::size_t i = 1; i < P.size(); ++i) Q[i + 1] -= static_cast<double>(i) * P[i];
    poly_.push_back(std::move(Q));
  }
  binom_.assign(static_cast<std::size_t>(d_max_ + 1), std::vector<double>(static_cast<std::size_t>(d_max_ + 1), 0.0));
  for (int n = 0; n <= d_max_; ++n) {
    binom_[n][0] = 1.0;
    for (int k = 1; k <= n; ++k) binom_[n][k] = binom_[n - 1][k - 1] + (k <= n - 1 ? binom_[n - 1][k] : 0.0);
  }

  sup_.assign(static_cast<std::size_t>(d_max_ + 1), 0.0);
  std::vector<double> d(static_cast<std::size_t>(d_max_ + 1));
  for (int i = 0; i <= 40000; ++i) {
    const double y = 0.25 + 0.25 * i / 40000.0;
    derivatives(y, d);
    for (int k = 0; k <= d_max_; ++k) sup_[k] = std::max(sup_[k], std::abs(d[k]));
  }
  // exact: the transition integrates to 1/8 per side by the symmetry G(u) + G(1-u) = 1
  integral_ = 0.5 + 2 * simpson([&](double y) { return (*this)(y); }, 0.25, 0.5, 20000);
  l2_norm_ = std::sqrt(0.5 + 2 * simpson([&](double y) { const double v = (*this)(y); return v * v; }, 0.25, 0.5, 20000));
}

void SmoothCutoff::g_derivatives(double u, int K, double* out) const {
  if (u <= 0.0) { std::fill(out, out + K + 1, 0.0); return; }
  const double v = 1.0 / u;
  if (v > kUnderflow) { std::fill(out, out + K + 1, 0.0); return; }
  const double g = std::exp(-v);
  for (int k = 0; k <= K; ++k) {
    const auto& P = poly_[static_cast<std::size_t>(k)];
    double acc = 0.0;
    for (std::size_t i = P.size(); i-- > 0;) acc = acc * v + P[i];
    out[k] = acc * g;
  }
}

void SmoothCutoff::G_derivatives(double u, int K, double* out) const {
  double a[kMaxOrder + 1], b[kMaxOrder + 1];
  g_derivatives(u, K, a);
  g_derivatives(1.0 - u, K, b);
  // B = g(u) + g(1-u); B^{(i)} = g^{(i)}(u) + (-1)^i g^{(i)}(1-u)
  for (int i = 0; i <= K; ++i) b[i] = a[i] + ((i % 2) ? -b[i] : b[i]);
  // Leibniz on G B = A
  for (int k = 0; k <= K; ++k) {
    double s = a[k];
    for (int j = 0; j < k; ++j) s -= binom_[k][j] * out[j] * b[k - j];
    out[k] = s / b[0];
  }
}

double SmoothCutoff::operator()(double y) const {
  const double ay = std::abs(y);
  if (ay <= 0.25) return 1.0;
  if (ay >= 0.5) return 0.0;
  double G[1];
  G_derivatives(2.0 - 4.0 * ay, 0, G);
  return G[0];
}

double SmoothCutoff::derivative(int order, double y) const {
  if (order < 0 || order > d_max_) throw OrderError("cutoff derivative order exceeds d_max");
  if (order == 0) return (*this)(y);
  double d[kMaxOrder + 1];
  derivatives(y, std::span<double>(d, static_cast<std::size_t>(order + 1)));
  return d[order];
}

void SmoothCutoff::derivatives(double y, std::span<double> out) const {
  const int K = static_cast<int>(out.size()) - 1;
  if (K > d_max_) throw OrderError("cutoff derivative order exceeds d_max");
  const double ay = std::abs(y);
  if (ay >= 0.5) { std::fill(out.begin(), out.end(), 0.0); return; }
  if (ay <= 0.25) {
    std::fill(out.begin(), out.end(), 0.0);
    out[0] = 1.0;
    return;
  }
  double G[kMaxOrder + 1];
  G_derivatives(2.0 - 4.0 * ay, K, G);
  // du/dy = -4 sign(y)
  const double du = y > 0 ? -4.0 : 4.0;
  double f = 1.0;
  for (int k = 0; k <= K; ++k) {
    out[k] = f * G[k];
    f *= du;
  }
}

}  // namespace pevo::symbols

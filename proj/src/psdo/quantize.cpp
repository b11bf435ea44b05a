#include "pevo/psdo/quantize.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pevo/common/errors.hpp"

namespace pevo::psdo {

void check_aliasing(const FieldState& u, const QuantizeOptions& opts) {
  const auto& g = u.grid();
  const double cut = (1.0 - opts.alias_band) * g.xi_max();
  double hi = 0;
  for (std::size_t i = 0; i < g.N(); ++i)
    if (std::abs(g.xi(i)) >= cut) hi += std::norm(u.spectrum()[i]);
  hi = std::sqrt(hi * g.dxi() / (2 * std::numbers::pi));
  const double nrm = u.norm();
  if (hi > opts.alias_tol * nrm)
    throw AliasingError("spectral mass near the grid cutoff: " + std::to_string(hi / (nrm > 0 ? nrm : 1)));
}

FieldState quantize_apply(const symbols::Symbol& p, const FieldState& u, const QuantizeOptions& opts) {
  if (opts.check_aliasing) check_aliasing(u, opts);
  const auto& g = u.grid();
  const std::size_t N = g.N();
  const auto& uh = u.spectrum();

  if (!p.x_dependent()) {
    std::vector<cplx> vh(N);
    for (std::size_t i = 0; i < N; ++i) {
      const double xi = g.xi(i);
      vh[i] = p.xi_support().contains(xi) ? p(0.0, xi) * uh[i] : cplx{};
    }
    return FieldState::from_spectrum(u.grid_ptr(), std::move(vh), u.t(), u.log_scale());
  }
  if (!p.xi_dependent()) {
    std::vector<cplx> v(N);
    for (std::size_t j = 0; j < N; ++j) {
      const double x = g.x(j);
      v[j] = p.x_support().contains(x) ? p(x, 0.0) * u.values()[j] : cplx{};
    }
    return FieldState(u.grid_ptr(), std::move(v), u.t(), u.log_scale());
  }

  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < N; ++i)
    if (p.xi_support().contains(g.xi(i)) && uh[i] != cplx{}) cols.push_back(i);
  const double w = g.dxi() / (2 * std::numbers::pi);
  std::vector<cplx> v(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double x = g.x(j);
    if (!p.x_support().contains(x)) continue;
    cplx s{};
    for (std::size_t i : cols) s += g.phase(j, i) * p(x, g.xi(i)) * uh[i];
    v[j] = w * s;
  }
  return FieldState(u.grid_ptr(), std::move(v), u.t(), u.log_scale());
}

Eigen::MatrixXcd dense_matrix(const symbols::Symbol& p, const SymbolGrid2D& g) {
  const auto N = static_cast<Eigen::Index>(g.N());
  if (g.N() > 512) throw ResourceError("dense oracle limited to N <= 512");
  // M[j][l] = (1/N) sum_m exp(i (x_j - x_l) xi_m) p(x_j, xi_m)
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(N, N);
  for (Eigen::Index j = 0; j < N; ++j) {
    const double x = g.x(static_cast<std::size_t>(j));
    std::vector<cplx> row(g.N());
    for (std::size_t i = 0; i < g.N(); ++i) row[i] = p(x, g.xi(i)) * g.phase(static_cast<std::size_t>(j), i);
    for (Eigen::Index l = 0; l < N; ++l) {
      cplx s{};
      for (std::size_t i = 0; i < g.N(); ++i) s += row[i] * std::conj(g.phase(static_cast<std::size_t>(l), i));
      M(j, l) = s / static_cast<double>(N);
    }
  }
  return M;
}

}  // namespace pevo::psdo

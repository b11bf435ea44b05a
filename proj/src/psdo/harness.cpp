#include "pevo/psdo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pevo/common/errors.hpp"

namespace pevo::psdo {

using symbols::Interval;
using symbols::Symbol;

std::vector<FieldState> make_probe_corpus(std::shared_ptr<const SymbolGrid2D> grid, int count, std::uint64_t seed,
                                          Interval band, double guard) {
  ProbeRng rng(seed);
  const double lim = grid->retained_limit(guard);
  const Interval b = band.intersect({-lim, lim});
  if (!(b.hi > b.lo)) throw DomainError("probe band is empty");
  std::vector<FieldState> out;
  for (int k = 0; k < count; ++k) {
    const double width = b.width() * rng.uniform(0.1, 1.0);
    const double lo = b.lo + (b.width() - width) * rng.uniform();
    std::vector<cplx> spec(grid->N());
    bool any = false;
    for (std::size_t i = 0; i < grid->N(); ++i) {
      const double xi = grid->xi(i);
      if (xi < lo || xi > lo + width) continue;
      spec[i] = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
      any = true;
    }
    if (!any) {
      // band narrower than the spacing: use the nearest node
      const double c = lo + 0.5 * width;
      std::size_t best = 0;
      for (std::size_t i = 0; i < grid->N(); ++i)
        if (std::abs(grid->xi(i) - c) < std::abs(grid->xi(best) - c)) best = i;
      spec[best] = {1.0, 0.0};
    }
    out.push_back(FieldState::from_spectrum(grid, std::move(spec)));
  }
  return out;
}

CvReport cv_bound_harness(const Symbol& p, const std::vector<FieldState>& probes, const symbols::GridSample& sample,
                          std::uint64_t seed) {
  CvReport r;
  r.seed = seed;
  r.probes = static_cast<int>(probes.size());
  for (const auto& u : probes) r.max_op_ratio = std::max(r.max_op_ratio, quantize_apply(p, u).norm() / u.norm());
  r.seminorm_report = symbols::seminorm(p, 2, 2, sample);
  r.seminorm = r.seminorm_report.value;
  if (r.seminorm == 0.0) {
    if (r.max_op_ratio > 0) throw DegenerateError("seminorm sampled as zero while the operator is not");
    r.ratio = 0.0;
  } else {
    r.ratio = r.max_op_ratio / r.seminorm;
  }
  return r;
}

Eigen::MatrixXcd oscillatory_product(const Symbol& p1, const Symbol& p2, double theta, const SymbolGrid2D& g,
                                     std::size_t i_lo, std::size_t i_hi) {
  const std::size_t N = g.N();
  const double L = g.L();
  const double w = g.dxi() / (2 * std::numbers::pi);
  Eigen::MatrixXcd P(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(i_hi - i_lo + 1));
  std::vector<cplx> q(N), qh(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double x = g.x(j);
    for (std::size_t i = i_lo; i <= i_hi; ++i) {
      const double xi = g.xi(i);
      for (std::size_t l = 0; l < N; ++l) {
        double y = x + g.x(l);
        y = y - 2 * L * std::floor((y + L) / (2 * L));
        q[l] = p2(y, xi);
      }
      g.forward(q.data(), qh.data());
      cplx s{};
      for (std::size_t m = 0; m < N; ++m)
        if (qh[m] != cplx{}) s += p1(x, xi + theta * g.xi(m)) * qh[m];
      P(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i - i_lo)) = w * s;
    }
  }
  return P;
}

double grid_seminorm(const Eigen::MatrixXcd& P, int ell, const SymbolGrid2D& g) {
  const auto N = P.rows();
  const auto C = P.cols();
  if (ell > 2) throw OrderError("grid_seminorm supports ell <= 2");
  if (C < 2 * ell + 1) throw DomainError("grid_seminorm: too few frequency columns");
  // x-derivatives of every column, orders 0..ell
  std::vector<Eigen::MatrixXcd> dx(static_cast<std::size_t>(ell + 1), Eigen::MatrixXcd(N, C));
  std::vector<cplx> col(static_cast<std::size_t>(N)), hat(static_cast<std::size_t>(N)), back(static_cast<std::size_t>(N));
  for (Eigen::Index c = 0; c < C; ++c) {
    for (Eigen::Index j = 0; j < N; ++j) col[static_cast<std::size_t>(j)] = P(j, c);
    g.forward(col.data(), hat.data());
    for (int s = 0; s <= ell; ++s) {
      std::vector<cplx> h2(hat);
      for (std::size_t i = 0; i < g.N(); ++i) {
        const cplx f = std::pow(cplx(0.0, g.xi(i)), s);
        // the Nyquist mode has no symmetric partner; drop it for odd orders
        h2[i] = (s % 2 && i == 0) ? cplx{} : f * hat[i];
      }
      g.inverse(h2.data(), back.data());
      for (Eigen::Index j = 0; j < N; ++j) dx[static_cast<std::size_t>(s)](j, c) = back[static_cast<std::size_t>(j)];
    }
  }
  const double h = g.dxi();
  double sup = 0.0;
  for (int s = 0; s <= ell; ++s) {
    const auto& D = dx[static_cast<std::size_t>(s)];
    for (Eigen::Index c = ell; c < C - ell; ++c)
      for (Eigen::Index j = 0; j < N; ++j) {
        sup = std::max(sup, std::abs(D(j, c)));
        if (ell >= 1) sup = std::max(sup, std::abs((D(j, c + 1) - D(j, c - 1)) / (2 * h)));
        if (ell >= 2) sup = std::max(sup, std::abs((D(j, c + 1) - 2.0 * D(j, c) + D(j, c - 1)) / (h * h)));
      }
  }
  return sup;
}

TheoremBReport theorem_b_check(const Symbol& p1, const Symbol& p2, double theta, int ell, const SymbolGrid2D& grid,
                               std::size_t i_lo, std::size_t i_hi, const symbols::GridSample& sample) {
  TheoremBReport r;
  r.theta = theta;
  r.ell = ell;
  r.p_theta_seminorm = grid_seminorm(oscillatory_product(p1, p2, theta, grid, i_lo, i_hi), ell, grid);
  r.p1_seminorm = symbols::seminorm(p1, ell + 2, ell + 2, sample).value;
  r.p2_seminorm = symbols::seminorm(p2, ell + 2, ell + 2, sample).value;
  const double den = r.p1_seminorm * r.p2_seminorm;
  r.ratio = den > 0 ? r.p_theta_seminorm / den : 0.0;
  return r;
}

}  // namespace pevo::psdo

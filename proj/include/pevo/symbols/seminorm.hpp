#pragma once

#include "pevo/symbols/symbol.hpp"

namespace pevo::symbols {

// Uniform tensor sample of (x, xi), endpoints included.
struct GridSample {
  Interval x{-1.0, 1.0};
  Interval xi{-1.0, 1.0};
  int nx = 101;
  int nxi = 101;

  double x_at(int i) const { return nx == 1 ? 0.5 * (x.lo + x.hi) : x.lo + (x.hi - x.lo) * i / (nx - 1); }
  double xi_at(int i) const { return nxi == 1 ? 0.5 * (xi.lo + xi.hi) : xi.lo + (xi.hi - xi.lo) * i / (nxi - 1); }
};

struct SeminormReport {
  double value = 0.0;
  int nx = 0, nxi = 0;
  double dx = 0.0, dxi = 0.0;  // sample spacings
};

// Sampled max over gamma <= ell, sigma <= ellp of sup |d_xi^gamma d_x^sigma p|; a lower bound
// for the seminorm |p|_{ell, ellp}.
SeminormReport seminorm(const Symbol& p, int ell, int ellp, const GridSample& sample);

}  // namespace pevo::symbols

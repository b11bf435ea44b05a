#include "pevo/symbols/seminorm.hpp"

#include <algorithm>
#include <cmath>

namespace pevo::symbols {

SeminormReport seminorm(const Symbol& p, int ell, int ellp, const GridSample& s) {
  SeminormReport r;
  r.nx = s.nx;
  r.nxi = s.nxi;
  r.dx = s.nx > 1 ? s.x.width() / (s.nx - 1) : 0.0;
  r.dxi = s.nxi > 1 ? s.xi.width() / (s.nxi - 1) : 0.0;
  const int gmax = p.xi_dependent() ? ell : 0;
  const int smax = p.x_dependent() ? ellp : 0;
  for (int i = 0; i < s.nx; ++i)
    for (int k = 0; k < s.nxi; ++k) {
      const double x = s.x_at(i), xi = s.xi_at(k);
      for (int g = 0; g <= gmax; ++g)
        for (int sg = 0; sg <= smax; ++sg) r.value = std::max(r.value, std::abs(p.derivative(g, sg, x, xi)));
    }
  return r;
}

}  // namespace pevo::symbols

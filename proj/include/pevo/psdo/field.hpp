#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "pevo/psdo/grid.hpp"

namespace pevo::psdo {

// Complex profile on the grid at time t, stored with its discrete transform.
// The represented function is exp(log_scale) * values.
class FieldState {
 public:
  FieldState() = default;
  FieldState(std::shared_ptr<const SymbolGrid2D> grid, std::vector<cplx> values, double t = 0.0,
             double log_scale = 0.0);
  static FieldState from_spectrum(std::shared_ptr<const SymbolGrid2D> grid, std::vector<cplx> spectrum,
                                  double t = 0.0, double log_scale = 0.0);

  const SymbolGrid2D& grid() const { return *grid_; }
  const std::shared_ptr<const SymbolGrid2D>& grid_ptr() const { return grid_; }
  const std::vector<cplx>& values() const { return values_; }
  const std::vector<cplx>& spectrum() const { return spectrum_; }
  double t() const { return t_; }
  double log_scale() const { return log_scale_; }

  // L2 norms of `values` (without the log scale)
  double norm() const;           // sqrt(dx sum |u_j|^2)
  double spectral_norm() const;  // sqrt(dxi/2pi sum |u_hat_m|^2)
  double log_norm() const { return log_scale_ + std::log(norm()); }

  // mass fraction in |xi| >= (1 - fraction) xi_max
  double high_band_fraction(double fraction) const;
  // mass fraction in |x| >= (1 - fraction) L
  double edge_fraction(double fraction) const;

 private:
  std::shared_ptr<const SymbolGrid2D> grid_;
  std::vector<cplx> values_, spectrum_;
  double t_ = 0.0;
  double log_scale_ = 0.0;
};

}  // namespace pevo::psdo

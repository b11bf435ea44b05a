#pragma once

#include <memory>

#include "pevo/psdo/grid.hpp"
#include "pevo/symbols/cutoff.hpp"

namespace pevo::symbols {

// psi_hat(xi) = kappa h(2 xi), supported in |xi| <= 1/4, with kappa fixed by psi(0) = 2.
class PacketProfile {
 public:
  explicit PacketProfile(std::shared_ptr<const SmoothCutoff> cutoff);

  double psi_hat(double xi) const { return kappa_ * (*cutoff_)(2.0 * xi); }
  double psi(double x) const;  // quadrature of (1/2pi) int exp(i x xi) psi_hat(xi) dxi
  double kappa() const { return kappa_; }
  double l2_norm() const;      // ||psi||, by Plancherel
  const SmoothCutoff& cutoff() const { return *cutoff_; }

 private:
  std::shared_ptr<const SmoothCutoff> cutoff_;
  double kappa_ = 0.0;
};

// Throws ResolutionError when the grid's frequency spacing is not finer than 1/8.
PacketProfile build_packet_profile(std::shared_ptr<const SmoothCutoff> cutoff, const psdo::SymbolGrid2D& grid);

}  // namespace pevo::symbols

#include "pevo/symbols/packet.hpp"

#include <cmath>
#include <numbers>

#include "pevo/common/errors.hpp"
#include "pevo/common/quadrature.hpp"

namespace pevo::symbols {

namespace {
std::size_t intervals_for(double x) { return 2 * static_cast<std::size_t>(std::ceil(1000 + 10 * std::abs(x))); }
}

PacketProfile::PacketProfile(std::shared_ptr<const SmoothCutoff> cutoff) : cutoff_(std::move(cutoff)) {
  // psi(0) = (1/2pi) int psi_hat = 2
  const double I = 2 * simpson([&](double xi) { return (*cutoff_)(2 * xi); }, 0.0, 0.25, intervals_for(0));
  kappa_ = 4 * std::numbers::pi / I;
}

double PacketProfile::psi(double x) const {
  // psi_hat is real and even: psi(x) = (1/pi) int_0^{1/4} cos(x xi) psi_hat(xi) dxi
  return simpson([&](double xi) { return std::cos(x * xi) * psi_hat(xi); }, 0.0, 0.25, intervals_for(x)) /
         std::numbers::pi;
}

double PacketProfile::l2_norm() const {
  const double s = 2 * simpson([&](double xi) { const double v = psi_hat(xi); return v * v; }, 0.0, 0.25, 4000);
  return std::sqrt(s / (2 * std::numbers::pi));
}

PacketProfile build_packet_profile(std::shared_ptr<const SmoothCutoff> cutoff, const psdo::SymbolGrid2D& grid) {
  if (!(grid.dxi() < 0.125)) throw ResolutionError("frequency spacing must be finer than 1/8 to resolve psi_hat");
  return PacketProfile(std::move(cutoff));
}

}  // namespace pevo::symbols

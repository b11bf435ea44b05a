#include "pevo/psdo/field.hpp"

#include <cmath>
#include <numbers>

#include "pevo/common/errors.hpp"

namespace pevo::psdo {

FieldState::FieldState(std::shared_ptr<const SymbolGrid2D> grid, std::vector<cplx> values, double t,
                       double log_scale)
    : grid_(std::move(grid)), values_(std::move(values)), t_(t), log_scale_(log_scale) {
  if (values_.size() != grid_->N()) throw DomainError("field size does not match grid");
  spectrum_ = grid_->forward(values_);
}

FieldState FieldState::from_spectrum(std::shared_ptr<const SymbolGrid2D> grid, std::vector<cplx> spectrum,
                                     double t, double log_scale) {
  if (spectrum.size() != grid->N()) throw DomainError("spectrum size does not match grid");
  FieldState f;
  f.grid_ = std::move(grid);
  f.values_ = f.grid_->inverse(spectrum);
  f.spectrum_ = std::move(spectrum);
  f.t_ = t;
  f.log_scale_ = log_scale;
  return f;
}

double FieldState::norm() const {
  double s = 0;
  for (const auto& v : values_) s += std::norm(v);
  return std::sqrt(grid_->dx() * s);
}

double FieldState::spectral_norm() const {
  double s = 0;
  for (const auto& v : spectrum_) s += std::norm(v);
  return std::sqrt(grid_->dxi() / (2 * std::numbers::pi) * s);
}

double FieldState::high_band_fraction(double fraction) const {
  const double cut = (1.0 - fraction) * grid_->xi_max();
  double hi = 0, all = 0;
  for (std::size_t i = 0; i < spectrum_.size(); ++i) {
    const double w = std::norm(spectrum_[i]);
    all += w;
    if (std::abs(grid_->xi(i)) >= cut) hi += w;
  }
  return all > 0 ? hi / all : 0.0;
}

double FieldState::edge_fraction(double fraction) const {
  const double cut = (1.0 - fraction) * grid_->L();
  double hi = 0, all = 0;
  for (std::size_t j = 0; j < values_.size(); ++j) {
    const double w = std::norm(values_[j]);
    all += w;
    if (std::abs(grid_->x(j)) >= cut) hi += w;
  }
  return all > 0 ? hi / all : 0.0;
}

}  // namespace pevo::psdo

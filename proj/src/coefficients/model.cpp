#include "pevo/coefficients/model.hpp"

#include <algorithm>
#include <cmath>

#include "pevo/common/errors.hpp"

namespace pevo::coefficients {

namespace {
constexpr std::size_t kTimeCells = 4096;
}

cplx LowerCoefficient::derivative(int order, double t, double x) const {
  if (order < 0 || order > d_max)
    throw OrderError("coefficient derivative of order " + std::to_string(order) + " not available");
  return eval(t, x, order);
}

LowerCoefficient LowerCoefficient::zero() {
  LowerCoefficient c = constant(cplx{});
  c.is_zero_ = true;
  return c;
}

LowerCoefficient LowerCoefficient::constant(cplx v) {
  LowerCoefficient c;
  c.eval = [v](double, double, int order) { return order == 0 ? v : cplx{}; };
  c.d_max = 64;
  c.deriv_sup.assign(65, 0.0);
  c.deriv_sup[0] = std::abs(v);
  c.x_independent = true;
  c.t_independent = true;
  c.background = [v](double) { return v; };
  c.is_zero_ = v == cplx{};
  return c;
}

CoefficientModel::CoefficientModel(int p, double T, std::function<double(double)> a_p, double m,
                                   std::vector<LowerCoefficient> lower, std::string family,
                                   bool a_p_constant)
    : p_(p), T_(T), a_p_(std::move(a_p)), m_(m), lower_(std::move(lower)),
      family_(std::move(family)), a_p_constant_(a_p_constant) {
  if (p_ < 2) throw DomainError("evolution order p must be >= 2");
  if (!(T_ > 0)) throw DomainError("time horizon T must be positive");
  if (!(m_ > 0)) throw DomainError("lower bound m must be positive");
  if (lower_.size() != static_cast<std::size_t>(p_))
    throw DomainError("expected p lower-order coefficients a_0..a_{p-1}");
  for (int i = 0; i <= 1024; ++i) {
    const double t = T_ * i / 1024.0;
    const double v = a_p_(t);
    if (std::abs(v) < m_ * (1 - 1e-12)) throw DomainError("|a_p(t)| < m at t = " + std::to_string(t));
    sup_abs_a_p_ = std::max(sup_abs_a_p_, std::abs(v));
  }
  if (!a_p_constant_) A_table_ = std::make_shared<PrimitiveTable<double>>(a_p_, 0.0, T_, kTimeCells);
  b_tables_.resize(lower_.size());
  for (std::size_t j = 0; j < lower_.size(); ++j) {
    const auto& c = lower_[j];
    if (c.background && !c.t_independent) {
      auto bg = c.background;
      b_tables_[j] = std::make_shared<PrimitiveTable<cplx>>(bg, 0.0, T_, kTimeCells);
    }
  }
}

double CoefficientModel::A_p(double t) const {
  if (a_p_constant_) return a_p_(0.0) * t;
  return (*A_table_)(t);
}

cplx CoefficientModel::background_integral(int j, double t) const {
  const auto& c = lower(j);
  if (!c.background) return {};
  if (b_tables_[static_cast<std::size_t>(j)]) return (*b_tables_[static_cast<std::size_t>(j)])(t);
  return c.background(0.0) * t;
}

bool CoefficientModel::lower_time_independent() const {
  return std::all_of(lower_.begin(), lower_.end(), [](const auto& c) { return c.t_independent; });
}

bool CoefficientModel::time_independent() const { return a_p_constant_ && lower_time_independent(); }

bool CoefficientModel::all_x_independent() const {
  return std::all_of(lower_.begin(), lower_.end(), [](const auto& c) { return c.x_independent; });
}

void CoefficientModel::require_derivatives(int order) const {
  for (std::size_t j = 0; j < lower_.size(); ++j)
    if (lower_[j].d_max < order)
      throw OrderError("coefficient a_" + std::to_string(j) + " exposes only " +
                       std::to_string(lower_[j].d_max) + " derivatives, need " + std::to_string(order));
}

CoefficientModel CoefficientModel::negated() const {
  auto ap = a_p_;
  return CoefficientModel(p_, T_, [ap](double t) { return -ap(t); }, m_, lower_, family_ + "_negated",
                          a_p_constant_);
}

void CoefficientModel::validate_samples(int nt, double x_range, int nx) const {
  for (int i = 0; i < nt; ++i) {
    const double t = T_ * i / std::max(1, nt - 1);
    if (std::abs(a_p_(t)) < m_ * (1 - 1e-12)) throw DomainError("|a_p(t)| < m");
    for (std::size_t j = 0; j < lower_.size(); ++j) {
      const auto& c = lower_[j];
      const int orders = std::min<int>(c.d_max, static_cast<int>(c.deriv_sup.size()) - 1);
      for (int k = 0; k < nx; ++k) {
        const double x = -x_range + 2 * x_range * k / std::max(1, nx - 1);
        for (int b = 0; b <= std::min(orders, 4); ++b) {
          const double v = std::abs(c.eval(t, x, b));
          if (!std::isfinite(v) || v > c.deriv_sup[static_cast<std::size_t>(b)] * (1 + 1e-9) + 1e-12)
            throw DomainError("coefficient a_" + std::to_string(j) + " exceeds its derivative bound");
        }
      }
    }
  }
}

}  // namespace pevo::coefficients

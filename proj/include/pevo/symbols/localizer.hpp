#pragma once

#include <memory>

#include "pevo/coefficients/model.hpp"
#include "pevo/symbols/cutoff.hpp"
#include "pevo/symbols/seminorm.hpp"
#include "pevo/symbols/symbol.hpp"

namespace pevo::symbols {

// asymptotic: exponents obey mu > p + 1 and mu + 1 < a <= (p mu - 2)/(p - 1).
// scaled: reduced exponents for solver-scale experiments, only a > mu + 1 > 1 is required.
enum class Regime { asymptotic, scaled };

struct LocalizerParams {
  double x_k = 0.0;
  double rho = 4.0;
  double a = 5.0;
  double mu = 3.5;
  int s = 4;
  Regime regime = Regime::asymptotic;
};

struct SupportBox {
  double x_center, x_half;  // |x - x_center| <= x_half
  double xi_lo, xi_hi;
  bool contains(double x, double xi) const { return std::abs(x - x_center) <= x_half && xi >= xi_lo && xi <= xi_hi; }
};

struct SupportReport {
  double max_outside = 0.0;
  double max_inside = 0.0;
  long points_outside = 0;
  long points_inside = 0;
};

// w^{a,b}(t, x, xi) = rho^{1/2} h^{(a)}(rho (x - x_k - p A_p(t) xi^{p-1})) h^{(b)}(rho^mu (xi/n - 1)), n = rho^a.
class LocalizerFamily {
 public:
  LocalizerFamily(std::shared_ptr<const coefficients::CoefficientModel> model,
                  std::shared_ptr<const SmoothCutoff> cutoff, const LocalizerParams& params);

  static void validate_exponents(double a, double mu, int p, Regime regime);
  // smallest integer s with s >= (a(q+p-2) + mu + 5/2) / (a - mu - 1)
  static int required_s(double a, double mu, int p, double q);

  double x_k() const { return par_.x_k; }
  double rho() const { return par_.rho; }
  double a() const { return par_.a; }
  double mu() const { return par_.mu; }
  int s() const { return par_.s; }
  int p() const { return p_; }
  double n() const { return n_; }
  double c_p() const { return c_p_; }
  Regime regime() const { return par_.regime; }
  double horizon() const { return horizon_; }  // rho / n^{p-1}
  double weight() const { return std::pow(par_.rho, par_.mu + 1) / n_; }
  double A_p(double t) const { return model_->A_p(t); }
  const coefficients::CoefficientModel& model() const { return *model_; }
  const SmoothCutoff& cutoff() const { return *cutoff_; }

  double x_argument(double t, double x, double xi) const;
  double xi_argument(double xi) const { return rho_mu_ * (xi / n_ - 1.0); }

  double value(int alpha, int beta, double t, double x, double xi) const;
  // d_xi^dxi d_x^dx w^{alpha,beta}
  double derivative(int alpha, int beta, int dxi, int dx, double t, double x, double xi) const;
  Symbol symbol(int alpha, int beta, double t) const;
  // d_xi^nu w^{alpha,beta} as a symbol
  Symbol xi_derivative_symbol(int alpha, int beta, int nu, double t) const;

  double chi1(double xi) const;
  double chi2(double t, double x, double xi) const;
  Symbol chi1_symbol() const;
  Symbol one_minus_chi1_symbol() const;

  Interval xi_support() const;
  Interval x_support(double t) const;  // exact hull of the x-support at time t
  SupportBox lemma2_box(double t) const;
  GridSample default_sample(double t, int nx, int nxi, double x_stretch = 1.2, double xi_stretch = 1.2) const;

 private:
  std::shared_ptr<const coefficients::CoefficientModel> model_;
  std::shared_ptr<const SmoothCutoff> cutoff_;
  LocalizerParams par_;
  int p_;
  double n_, c_p_, horizon_, rho_mu_, sqrt_rho_;
};

SupportReport support_check(const LocalizerFamily& fam, int alpha, int beta, double t, const GridSample& sample);

// sup |d_t w + p a_p(t) xi^{p-1} d_x w| / sup |p a_p(t) xi^{p-1} d_x w| for w = w^{0,0},
// with d_t by centered differences of step dt_rel / (rho p sup|a_p| n^{p-1}).
double transport_residual(const LocalizerFamily& fam, double t, const GridSample& sample, double dt_rel = 1e-3);

// sup |d_xi^g d_x^s w^{a,b}| / (rho^{1/2+s} (rho^mu/n)^g)
double ab1_pointwise_constant(const LocalizerFamily& fam, int alpha, int beta, int gamma, int sigma, double t,
                              const GridSample& sample);
// |w^{a,b}|_{l,l} / rho^{1/2+l}
double ab1_seminorm_constant(const LocalizerFamily& fam, int alpha, int beta, int ell, double t,
                             const GridSample& sample);
// |xi^h d_xi^nu w^{a,b}|_{l,l} / (n^h rho^{1/2+l} (rho^mu/n)^nu)
double ab1_weighted_constant(const LocalizerFamily& fam, int alpha, int beta, int h, int nu, int ell, double t,
                             const GridSample& sample);

}  // namespace pevo::symbols

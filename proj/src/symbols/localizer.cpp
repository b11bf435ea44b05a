#include "pevo/symbols/localizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pevo/common/errors.hpp"
#include "pevo/common/faa_di_bruno.hpp"

namespace pevo::symbols {

void LocalizerFamily::validate_exponents(double a, double mu, int p, Regime regime) {
  if (regime == Regime::asymptotic) {
    if (!(mu > p + 1)) throw DomainError("exponents: need mu > p + 1");
    const double upper = (p * mu - 2.0) / (p - 1.0);
    if (!(mu + 1 < a && a <= upper * (1 + 1e-12)))
      throw DomainError("exponents: need mu + 1 < a <= (p mu - 2)/(p - 1)");
  } else {
    if (!(mu > 0)) throw DomainError("scaled exponents: need mu > 0");
    if (!(a > mu + 1)) throw DomainError("scaled exponents: need a > mu + 1");
  }
}

int LocalizerFamily::required_s(double a, double mu, int p, double q) {
  const double v = (a * (q + p - 2) + mu + 2.5) / (a - mu - 1);
  return static_cast<int>(std::ceil(v - 1e-12));
}

LocalizerFamily::LocalizerFamily(std::shared_ptr<const coefficients::CoefficientModel> model,
                                 std::shared_ptr<const SmoothCutoff> cutoff, const LocalizerParams& params)
    : model_(std::move(model)), cutoff_(std::move(cutoff)), par_(params), p_(model_->p()) {
  validate_exponents(par_.a, par_.mu, p_, par_.regime);
  if (!(par_.rho >= 1)) throw DomainError("localizer: rho must be >= 1");
  if (par_.s < 0) throw DomainError("localizer: s must be >= 0");
  n_ = std::pow(par_.rho, par_.a);
  c_p_ = std::max(1.0, p_ * std::pow(2.0, p_ - 1) * model_->sup_abs_a_p());
  horizon_ = par_.rho / std::pow(n_, p_ - 1);
  rho_mu_ = std::pow(par_.rho, par_.mu);
  sqrt_rho_ = std::sqrt(par_.rho);
}

double LocalizerFamily::x_argument(double t, double x, double xi) const {
  return par_.rho * (x - par_.x_k - p_ * model_->A_p(t) * std::pow(xi, p_ - 1));
}

double LocalizerFamily::value(int alpha, int beta, double t, double x, double xi) const {
  const int d = cutoff_->d_max();
  if (alpha < 0 || beta < 0 || alpha > d || beta > d) throw OrderError("localizer index exceeds cutoff order");
  const double Xi = xi_argument(xi);
  if (std::abs(Xi) >= 0.5) return 0.0;
  const double X = x_argument(t, x, xi);
  if (std::abs(X) >= 0.5) return 0.0;
  return sqrt_rho_ * cutoff_->derivative(alpha, X) * cutoff_->derivative(beta, Xi);
}

double LocalizerFamily::derivative(int alpha, int beta, int dxi, int dx, double t, double x, double xi) const {
  const int d = cutoff_->d_max();
  if (alpha + dx + dxi > d || beta + dxi > d || alpha < 0 || beta < 0 || dxi < 0 || dx < 0)
    throw OrderError("localizer derivative exceeds cutoff order");
  if (dxi == 0 && dx == 0) return value(alpha, beta, t, x, xi);
  const double Xi = xi_argument(xi);
  if (std::abs(Xi) >= 0.5) return 0.0;
  const double X = x_argument(t, x, xi);
  if (std::abs(X) >= 0.5) return 0.0;

  const int q = alpha + dx;
  std::vector<double> hx(static_cast<std::size_t>(q + dxi + 1)), hxi(static_cast<std::size_t>(beta + dxi + 1));
  cutoff_->derivatives(X, hx);
  cutoff_->derivatives(Xi, hxi);
  // inner derivatives of X(xi): X^{(r)} = -rho p A_p (p-1)...(p-r) xi^{p-1-r}
  const double A = model_->A_p(t);
  std::vector<double> inner(static_cast<std::size_t>(dxi + 1), 0.0);
  for (int r = 1; r <= dxi && r <= p_ - 1; ++r) {
    double c = 1.0;
    for (int i = 1; i <= r; ++i) c *= (p_ - i);
    inner[static_cast<std::size_t>(r)] = -par_.rho * p_ * A * c * std::pow(xi, p_ - 1 - r);
  }
  const auto B = bell_table(inner, dxi);
  const double s_xi = rho_mu_ / n_;
  double total = 0.0;
  for (int i = 0; i <= dxi; ++i) {
    double di = 0.0;  // d^i/dxi^i h^{(q)}(X(xi))
    if (i == 0) di = hx[static_cast<std::size_t>(q)];
    else
      for (int k = 1; k <= i; ++k) di += hx[static_cast<std::size_t>(q + k)] * B[i][k];
    total += binomial(dxi, i) * di * std::pow(s_xi, dxi - i) * hxi[static_cast<std::size_t>(beta + dxi - i)];
  }
  return sqrt_rho_ * std::pow(par_.rho, dx) * total;
}

Symbol LocalizerFamily::symbol(int alpha, int beta, double t) const {
  const int d = cutoff_->d_max();
  const LocalizerFamily self = *this;
  auto fn = [self, alpha, beta, t](int dxi, int dx, double x, double xi) -> cplx {
    return self.derivative(alpha, beta, dxi, dx, t, x, xi);
  };
  const int max_dx = d - alpha;
  const int max_dxi = std::min(d - beta, d - alpha);
  return Symbol(fn, max_dxi, max_dx, true, true, x_support(t), xi_support());
}

Symbol LocalizerFamily::xi_derivative_symbol(int alpha, int beta, int nu, double t) const {
  const int d = cutoff_->d_max();
  const LocalizerFamily self = *this;
  auto fn = [self, alpha, beta, nu, t](int dxi, int dx, double x, double xi) -> cplx {
    return self.derivative(alpha, beta, dxi + nu, dx, t, x, xi);
  };
  return Symbol(fn, std::min(d - beta, d - alpha) - nu, d - alpha - nu, true, true, x_support(t), xi_support());
}

double LocalizerFamily::chi1(double xi) const { return (*cutoff_)(xi_argument(xi) / 3.0); }

double LocalizerFamily::chi2(double t, double x, double xi) const {
  return (*cutoff_)(x_argument(t, x, xi) / (4.0 * p_ * c_p_));
}

Symbol LocalizerFamily::chi1_symbol() const {
  const LocalizerFamily self = *this;
  const double scale = rho_mu_ / (3.0 * n_);
  auto f = [self, scale](int order, double xi) -> cplx {
    return std::pow(scale, order) * self.cutoff().derivative(order, self.xi_argument(xi) / 3.0);
  };
  const double half = 1.5 / rho_mu_;
  return Symbol::of_xi(f, cutoff_->d_max(), {n_ * (1 - half), n_ * (1 + half)});
}

Symbol LocalizerFamily::one_minus_chi1_symbol() const {
  const LocalizerFamily self = *this;
  const double scale = rho_mu_ / (3.0 * n_);
  auto f = [self, scale](int order, double xi) -> cplx {
    const double v = std::pow(scale, order) * self.cutoff().derivative(order, self.xi_argument(xi) / 3.0);
    return order == 0 ? 1.0 - v : -v;
  };
  return Symbol::of_xi(f, cutoff_->d_max());
}

Interval LocalizerFamily::xi_support() const {
  const double half = 0.5 / rho_mu_;
  return {n_ * (1 - half), n_ * (1 + half)};
}

Interval LocalizerFamily::x_support(double t) const {
  const auto xs = xi_support();
  const double c = p_ * model_->A_p(t);
  const double e1 = c * std::pow(xs.lo, p_ - 1), e2 = c * std::pow(xs.hi, p_ - 1);
  const double half = 0.5 / par_.rho;
  return {par_.x_k + std::min(e1, e2) - half, par_.x_k + std::max(e1, e2) + half};
}

SupportBox LocalizerFamily::lemma2_box(double t) const {
  const auto xs = xi_support();
  return {par_.x_k + p_ * model_->A_p(t) * std::pow(n_, p_ - 1), c_p_ / par_.rho, xs.lo, xs.hi};
}

GridSample LocalizerFamily::default_sample(double t, int nx, int nxi, double x_stretch, double xi_stretch) const {
  const auto box = lemma2_box(t);
  const double xh = x_stretch * box.x_half;
  const double kh = xi_stretch * 0.5 / rho_mu_;
  GridSample s;
  s.x = {box.x_center - xh, box.x_center + xh};
  s.xi = {n_ * (1 - kh), n_ * (1 + kh)};
  s.nx = nx;
  s.nxi = nxi;
  return s;
}

SupportReport support_check(const LocalizerFamily& fam, int alpha, int beta, double t, const GridSample& sample) {
  SupportReport r;
  const auto box = fam.lemma2_box(t);
  for (int i = 0; i < sample.nx; ++i)
    for (int k = 0; k < sample.nxi; ++k) {
      const double x = sample.x_at(i), xi = sample.xi_at(k);
      const double v = std::abs(fam.value(alpha, beta, t, x, xi));
      if (box.contains(x, xi)) {
        r.max_inside = std::max(r.max_inside, v);
        ++r.points_inside;
      } else {
        r.max_outside = std::max(r.max_outside, v);
        ++r.points_outside;
      }
    }
  return r;
}

double transport_residual(const LocalizerFamily& fam, double t, const GridSample& sample, double dt_rel) {
  const auto& model = fam.model();
  const int p = fam.p();
  const double scale_t = 1.0 / (fam.rho() * p * model.sup_abs_a_p() * std::pow(fam.n(), p - 1));
  double dt = dt_rel * scale_t;
  const double T = model.T();
  double res = 0.0, ref = 0.0;
  for (int i = 0; i < sample.nx; ++i)
    for (int k = 0; k < sample.nxi; ++k) {
      const double x = sample.x_at(i), xi = sample.xi_at(k);
      double wt;
      if (t - dt >= 0 && t + dt <= T) {
        wt = (fam.value(0, 0, t + dt, x, xi) - fam.value(0, 0, t - dt, x, xi)) / (2 * dt);
      } else if (t - dt < 0) {
        wt = (-3 * fam.value(0, 0, t, x, xi) + 4 * fam.value(0, 0, t + dt, x, xi) - fam.value(0, 0, t + 2 * dt, x, xi)) /
             (2 * dt);
      } else {
        wt = (3 * fam.value(0, 0, t, x, xi) - 4 * fam.value(0, 0, t - dt, x, xi) + fam.value(0, 0, t - 2 * dt, x, xi)) /
             (2 * dt);
      }
      const double adv = p * model.a_p(t) * std::pow(xi, p - 1) * fam.derivative(0, 0, 0, 1, t, x, xi);
      res = std::max(res, std::abs(wt + adv));
      ref = std::max(ref, std::abs(adv));
    }
  return ref > 0 ? res / ref : res;
}

double ab1_pointwise_constant(const LocalizerFamily& fam, int alpha, int beta, int gamma, int sigma, double t,
                              const GridSample& sample) {
  double sup = 0.0;
  for (int i = 0; i < sample.nx; ++i)
    for (int k = 0; k < sample.nxi; ++k)
      sup = std::max(sup, std::abs(fam.derivative(alpha, beta, gamma, sigma, t, sample.x_at(i), sample.xi_at(k))));
  const double scale = std::pow(fam.rho(), 0.5 + sigma) * std::pow(std::pow(fam.rho(), fam.mu()) / fam.n(), gamma);
  return sup / scale;
}

double ab1_seminorm_constant(const LocalizerFamily& fam, int alpha, int beta, int ell, double t,
                             const GridSample& sample) {
  return seminorm(fam.symbol(alpha, beta, t), ell, ell, sample).value / std::pow(fam.rho(), 0.5 + ell);
}

double ab1_weighted_constant(const LocalizerFamily& fam, int alpha, int beta, int h, int nu, int ell, double t,
                             const GridSample& sample) {
  const auto sym = Symbol::xi_power_times(h, fam.xi_derivative_symbol(alpha, beta, nu, t));
  const double scale = std::pow(fam.n(), h) * std::pow(fam.rho(), 0.5 + ell) *
                       std::pow(std::pow(fam.rho(), fam.mu()) / fam.n(), nu);
  return seminorm(sym, ell, ell, sample).value / scale;
}

}  // namespace pevo::symbols

#include "pevo/solver/cauchy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pevo/common/errors.hpp"

namespace pevo::solver {

void SolverConfig::validate() const {
  if (order != 4) throw DomainError("solver: only the fourth-order scheme is implemented");
  if (guard < 0.25 || guard > 0.5) throw DomainError("solver: guard fraction must lie in [1/4, 1/2]");
  if (!(c_step > 0)) throw DomainError("solver: c_step must be positive");
  if (dt < 0) throw DomainError("solver: dt must be non-negative");
}

namespace {

struct Variable {
  int j;
  bool t_independent;
  std::vector<cplx> cached;  // a_j(x) - b_j at the nodes when t-independent
};

class Stepper {
 public:
  Stepper(const coefficients::CoefficientModel& model, const psdo::SymbolGrid2D& grid, const SolverConfig& cfg)
      : model_(model), grid_(grid), cfg_(cfg), N_(grid.N()) {
    const double lim = grid.retained_limit(cfg.guard);
    mask_.resize(N_);
    for (std::size_t i = 0; i < N_; ++i) mask_[i] = std::abs(grid.xi(i)) <= lim ? 1.0 : 0.0;
    pow_.assign(static_cast<std::size_t>(model.p() + 1), std::vector<double>(N_, 1.0));
    for (int j = 1; j <= model.p(); ++j)
      for (std::size_t i = 0; i < N_; ++i) pow_[static_cast<std::size_t>(j)][i] = pow_[static_cast<std::size_t>(j - 1)][i] * grid.xi(i);
    for (int j = 0; j < model.p(); ++j) {
      const auto& c = model.lower(j);
      if (c.is_zero()) continue;
      const bool in_factor = cfg.factor == IntegratingFactor::full_background;
      if (c.x_independent) {
        if (!in_factor) multipliers_.push_back(j);
        continue;
      }
      if (!in_factor && c.background) multipliers_.push_back(j);
      Variable v{j, c.t_independent, {}};
      if (c.t_independent) {
        v.cached.resize(N_);
        for (std::size_t n = 0; n < N_; ++n) v.cached[n] = variable_part(j, 0.0, grid.x(n));
      }
      variables_.push_back(std::move(v));
    }
    tmp_.resize(N_);
    spec_.resize(N_);
    acc_.resize(N_);
  }

  bool has_rhs() const { return !variables_.empty() || !multipliers_.empty(); }

  // E(t2, t1) = exp(-i (Phi(t2) - Phi(t1))), d/dt Phi = a_p xi^p + sum_{factor} b_j xi^j.
  // The last result per slot is cached since constant steps repeat the same increments.
  void propagator(double t2, double t1, int slot) {
    std::vector<cplx> key(static_cast<std::size_t>(model_.p() + 1));
    key[static_cast<std::size_t>(model_.p())] = model_.A_p(t2) - model_.A_p(t1);
    if (cfg_.factor == IntegratingFactor::full_background)
      for (int j = 0; j < model_.p(); ++j) {
        const auto& c = model_.lower(j);
        if (c.is_zero() || !c.background) continue;
        key[static_cast<std::size_t>(j)] = model_.background_integral(j, t2) - model_.background_integral(j, t1);
      }
    auto& cache = cache_[static_cast<std::size_t>(slot)];
    if (cache.valid && cache.key == key) return;
    cache.key = key;
    cache.valid = true;
    auto& E = cache.E;
    E.resize(N_);
    for (std::size_t i = 0; i < N_; ++i) {
      if (mask_[i] == 0.0) { E[i] = 0.0; continue; }
      cplx d{};
      for (std::size_t j = 0; j < key.size(); ++j)
        if (key[j] != cplx{}) d += key[j] * pow_[j][i];
      E[i] = std::exp(cplx(0.0, -1.0) * d);
    }
  }

  // rhs(t, u_hat) = -i F[sum_j r_j D^j u] - i sum_{multipliers} b_j xi^j u_hat
  void rhs(double t, const std::vector<cplx>& uh, std::vector<cplx>& out) {
    out.assign(N_, cplx{});
    if (!variables_.empty()) {
      std::fill(acc_.begin(), acc_.end(), cplx{});
      for (auto& v : variables_) {
        const auto& pw = pow_[static_cast<std::size_t>(v.j)];
        for (std::size_t i = 0; i < N_; ++i) spec_[i] = pw[i] * uh[i];
        grid_.inverse(spec_.data(), tmp_.data());
        if (v.t_independent) {
          for (std::size_t n = 0; n < N_; ++n) acc_[n] += v.cached[n] * tmp_[n];
        } else {
          for (std::size_t n = 0; n < N_; ++n) acc_[n] += variable_part(v.j, t, grid_.x(n)) * tmp_[n];
        }
      }
      grid_.forward(acc_.data(), out.data());
    }
    for (int j : multipliers_) {
      const cplx b = model_.lower(j).background_value(t);
      const auto& pw = pow_[static_cast<std::size_t>(j)];
      for (std::size_t i = 0; i < N_; ++i) out[i] += b * pw[i] * uh[i];
    }
    for (std::size_t i = 0; i < N_; ++i) out[i] *= cplx(0.0, -1.0) * mask_[i];
  }

  // One Lawson RK4 step from t to t + h.
  void step(double t, double h, std::vector<cplx>& uh) {
    propagator(t + h, t, 0);
    const auto& Eh = cache_[0].E;
    if (!has_rhs()) {
      for (std::size_t i = 0; i < N_; ++i) uh[i] *= Eh[i];
      return;
    }
    propagator(t + 0.5 * h, t, 1);
    propagator(t + h, t + 0.5 * h, 2);
    const auto& Em = cache_[1].E;
    const auto& Em2 = cache_[2].E;
    rhs(t, uh, k1_);
    for (std::size_t i = 0; i < N_; ++i) w_[i] = Em[i] * (uh[i] + 0.5 * h * k1_[i]);
    rhs(t + 0.5 * h, w_, k2_);
    for (std::size_t i = 0; i < N_; ++i) w_[i] = Em[i] * uh[i] + 0.5 * h * k2_[i];
    rhs(t + 0.5 * h, w_, k3_);
    for (std::size_t i = 0; i < N_; ++i) w_[i] = Eh[i] * uh[i] + h * Em2[i] * k3_[i];
    rhs(t + h, w_, k4_);
    for (std::size_t i = 0; i < N_; ++i)
      uh[i] = Eh[i] * uh[i] + (h / 6.0) * (Eh[i] * k1_[i] + 2.0 * Em2[i] * (k2_[i] + k3_[i]) + k4_[i]);
  }

  void prepare() { w_.resize(N_); }
  const std::vector<double>& mask() const { return mask_; }

 private:
  cplx variable_part(int j, double t, double x) const {
    const auto& c = model_.lower(j);
    return c.value(t, x) - c.background_value(t);
  }

  const coefficients::CoefficientModel& model_;
  const psdo::SymbolGrid2D& grid_;
  SolverConfig cfg_;
  std::size_t N_;
  std::vector<double> mask_;
  std::vector<Variable> variables_;
  std::vector<int> multipliers_;
  std::vector<cplx> tmp_, spec_, acc_;
  struct Cached {
    bool valid = false;
    std::vector<cplx> key, E;
  };
  Cached cache_[3];
  std::vector<std::vector<double>> pow_;  // xi^j, j = 0..p
  std::vector<cplx> k1_, k2_, k3_, k4_, w_;
};

double spectral_norm(const psdo::SymbolGrid2D& g, const std::vector<cplx>& uh) {
  double s = 0;
  for (const auto& v : uh) s += std::norm(v);
  return std::sqrt(s * g.dxi() / (2 * std::numbers::pi));
}

}  // namespace

SolveResult solve_cauchy(const coefficients::CoefficientModel& model, const FieldState& g,
                         const std::vector<double>& checkpoints, const SolverConfig& cfg) {
  cfg.validate();
  const auto& grid = g.grid();
  const int p = model.p();
  const double t0 = g.t();
  if (t0 < 0 || t0 > model.T()) throw DomainError("solver: initial time outside [0, T]");
  int dir = 0;
  double prev = t0;
  for (double tc : checkpoints) {
    if (tc < -1e-15 || tc > model.T() * (1 + 1e-12)) throw DomainError("solver: checkpoint outside [0, T]");
    const int d = tc > prev ? 1 : (tc < prev ? -1 : 0);
    if (d != 0) {
      if (dir != 0 && d != dir) throw DomainError("solver: checkpoints must be monotone");
      dir = d;
    }
    prev = tc;
  }

  const double lim = grid.retained_limit(cfg.guard);
  {
    double outside = 0, all = 0;
    for (std::size_t i = 0; i < grid.N(); ++i) {
      const double w = std::norm(g.spectrum()[i]);
      all += w;
      if (std::abs(grid.xi(i)) > lim) outside += w;
    }
    if (all > 0 && std::sqrt(outside / all) > 1e-10)
      throw GuardBandError("solver: initial datum is not band-limited within the guard band");
  }

  const double n_max = cfg.n_max > 0 ? cfg.n_max : lim;
  // Energy estimate: d/dt log||u|| <= sum_j sup|Im a_j| n^j + (j/2) sup|d_x a_j| n^{j-1}; kappa doubles it.
  // sup|Im a_j| is sampled over the grid nodes and 17 times spanning the run.
  double t_last = t0;
  for (double tc : checkpoints) t_last = tc;
  double amax = 0.0, kappa = 0.0;
  for (int j = 0; j < p; ++j) {
    const auto& c = model.lower(j);
    if (c.is_zero()) continue;
    amax = std::max(amax, c.deriv_sup.empty() ? 0.0 : c.deriv_sup[0]);
    const bool have_d1 = c.deriv_sup.size() > 1;
    double im = 0.0, fd = 0.0;  // fd: grid difference quotient, used when no derivative bound is declared
    for (int r = 0; r <= 16; ++r) {
      const double tr = t0 + (t_last - t0) * r / 16.0;
      if (c.x_independent) {
        im = std::max(im, std::abs(c.value(tr, 0.0).imag()));
      } else {
        cplx prev_v = c.value(tr, grid.x(0));
        for (std::size_t i = 0; i < grid.N(); ++i) {
          const cplx v = c.value(tr, grid.x(i));
          im = std::max(im, std::abs(v.imag()));
          if (!have_d1 && i > 0) fd = std::max(fd, std::abs(v - prev_v) / grid.dx());
          prev_v = v;
        }
      }
      if (c.t_independent) break;
    }
    const double s1 = c.x_independent ? 0.0 : (have_d1 ? c.deriv_sup[1] : fd);
    kappa += 2.0 * (im * std::pow(n_max, j) + j * s1 * std::pow(n_max, std::max(0, j - 1)));
  }
  double dt = cfg.dt;
  const double dt_stable = amax > 0 ? cfg.c_step / (amax * std::pow(n_max, p - 1)) : 0.0;
  if (dt == 0.0) dt = dt_stable;

  Stepper st(model, grid, cfg);
  st.prepare();
  std::vector<cplx> uh = g.spectrum();
  for (std::size_t i = 0; i < uh.size(); ++i) uh[i] *= st.mask()[i];
  double log_scale = g.log_scale();
  const double log_norm0 = g.log_scale() + std::log(spectral_norm(grid, uh));

  SolveResult res;
  res.kappa = kappa;
  double t = t0;
  auto record = [&](double tc) {
    FieldState f = FieldState::from_spectrum(g.grid_ptr(), uh, tc, log_scale);
    const double wrap = f.edge_fraction(cfg.wrap_band);
    res.max_wrap_fraction = std::max(res.max_wrap_fraction, wrap);
    if (cfg.check_wrap && wrap > cfg.wrap_threshold)
      throw WrapError("solver: boundary mass fraction " + std::to_string(wrap) + " exceeds threshold");
    res.log_norms.push_back(f.log_norm());
    res.checkpoints.push_back(std::move(f));
  };
  for (double tc : checkpoints) {
    const double span = tc - t;
    if (span != 0.0) {
      std::size_t steps = 1;
      if (dt > 0 && st.has_rhs()) steps = static_cast<std::size_t>(std::ceil(std::abs(span) / dt - 1e-9));
      steps = std::max<std::size_t>(steps, 1);
      const double h = span / static_cast<double>(steps);
      for (std::size_t s = 0; s < steps; ++s) {
        const double ts = t + h * static_cast<double>(s);
        st.step(ts, h, uh);
        ++res.steps;
        const double nrm = spectral_norm(grid, uh);
        if (!std::isfinite(nrm)) throw InstabilityError("solver: non-finite field");
        if (nrm > 1e100 || (nrm < 1e-100 && nrm > 0)) {
          for (auto& v : uh) v /= nrm;
          log_scale += std::log(nrm);
        }
        const double ln = log_scale + std::log(spectral_norm(grid, uh));
        if (ln > cfg.log_overflow) throw InstabilityError("solver: log-norm overflow threshold exceeded");
        const double elapsed = std::abs(ts + h - t0);
        if (cfg.check_instability && ln - log_norm0 > kappa * elapsed + 1e-6)
          throw InstabilityError("solver: growth exceeds the a priori rate; refine the grid or step");
      }
      t = tc;
    }
    record(tc);
  }
  res.dt = dt;
  return res;
}

FieldState constant_coefficient_oracle(const coefficients::CoefficientModel& model, const FieldState& g, double t) {
  if (!model.all_x_independent()) throw MisuseError("oracle requires x-independent coefficients");
  const auto& grid = g.grid();
  std::vector<cplx> uh(grid.N());
  const double t0 = g.t();
  for (std::size_t i = 0; i < grid.N(); ++i) {
    const double xi = grid.xi(i);
    cplx ph = (model.A_p(t) - model.A_p(t0)) * std::pow(xi, model.p());
    for (int j = 0; j < model.p(); ++j) {
      const auto& c = model.lower(j);
      if (c.is_zero()) continue;
      ph += (model.background_integral(j, t) - model.background_integral(j, t0)) * std::pow(xi, j);
    }
    uh[i] = std::exp(cplx(0.0, -1.0) * ph) * g.spectrum()[i];
  }
  return FieldState::from_spectrum(g.grid_ptr(), std::move(uh), t, g.log_scale());
}

FieldState build_wavepacket(const symbols::PacketProfile& profile, double x_k, double n,
                            std::shared_ptr<const psdo::SymbolGrid2D> grid, double guard) {
  if (n + 0.25 > grid->retained_limit(guard)) throw GuardBandError("packet frequency too close to the grid cutoff");
  if (std::abs(x_k) > 0.5 * grid->L()) throw DomainError("packet center too close to the box boundary");
  std::vector<cplx> spec(grid->N());
  for (std::size_t i = 0; i < grid->N(); ++i) {
    const double xi = grid->xi(i);
    const double a = profile.psi_hat(xi - n);
    if (a != 0.0) spec[i] = a * std::exp(cplx(0.0, -x_k * xi));
  }
  return psdo::FieldState::from_spectrum(std::move(grid), std::move(spec));
}

}  // namespace pevo::solver

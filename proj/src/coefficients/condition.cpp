#include "pevo/coefficients/condition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pevo/common/errors.hpp"
#include "pevo/common/quadrature.hpp"

namespace pevo::coefficients {

std::string to_string(Side s) {
  switch (s) {
    case Side::full: return "full";
    case Side::forward: return "forward";
    case Side::backward: return "backward";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

Side side_from_string(const std::string& s) {
  if (s == "full") return Side::full;
  if (s == "forward") return Side::forward;
  if (s == "backward") return Side::backward;
  throw DomainError("unknown side '" + s + "'");
}

double trajectory_integral(const CoefficientModel& model, double x, double t, double tau, double rho_lo,
                           double rho_hi, const QuadratureSpec& quad) {
  if (tau < 0 || tau > t) throw DomainError("trajectory_integral: need 0 <= tau <= t");
  if (t > model.T() * (1 + 1e-12)) throw DomainError("trajectory_integral: t exceeds T");
  if (rho_hi < rho_lo) throw DomainError("trajectory_integral: rho_lo > rho_hi");
  if (rho_hi == rho_lo) return 0.0;
  const double width = rho_hi - rho_lo;
  const double step = std::min(quad.max_step, quad.relative_step * width);
  const double c = model.p() * model.a_p(tau);
  return simpson([&](double th) { return model.sub_imag(t, x + c * th); }, rho_lo, rho_hi,
                 simpson_intervals(width, step));
}

std::pair<double, double> least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n == 0) return {0.0, 0.0};
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxx > 0 ? sxy / sxx : 0.0;
  return {slope, my - slope * mx};
}

TrajectoryTables::TrajectoryTables(const CoefficientModel& model, const SearchSpec& spec, double y_lo,
                                   double y_hi)
    : model_(&model), nodes_(std::max(2, spec.triangle_nodes)) {
  const bool ap_const = model.a_p_constant();
  const bool coef_const = model.lower_time_independent();
  const int tau_nodes = ap_const ? 1 : nodes_;
  const int t_nodes = coef_const ? 1 : nodes_;
  speed_.resize(static_cast<std::size_t>(nodes_));
  for (int i = 0; i < nodes_; ++i) speed_[static_cast<std::size_t>(i)] = model.p() * model.a_p(node_time(i));
  const auto cells = static_cast<std::size_t>(std::ceil((y_hi - y_lo) / spec.table_step));
  tables_.resize(static_cast<std::size_t>(nodes_));
  for (int j = 0; j < t_nodes; ++j) {
    const int node = coef_const ? 0 : j;
    const double t = node_time(node);
    const CoefficientModel* m = model_;
    tables_[static_cast<std::size_t>(node)] = std::make_shared<PrimitiveTable<double>>(
        [m, t](double y) { return m->sub_imag(t, y); }, y_lo, y_hi, std::max<std::size_t>(cells, 16));
  }
  if (coef_const)
    for (int j = 1; j < nodes_; ++j) tables_[static_cast<std::size_t>(j)] = tables_[0];
  // When a_p is constant only t matters; when the coefficient is t-independent only tau matters.
  if (ap_const && coef_const) {
    pairs_.push_back({0, 0});
  } else if (ap_const) {
    for (int j = 0; j < nodes_; ++j) pairs_.push_back({0, j});
  } else if (coef_const) {
    for (int i = 0; i < nodes_; ++i) pairs_.push_back({i, nodes_ - 1});
  } else {
    for (int j = 0; j < nodes_; ++j)
      for (int i = 0; i <= j; ++i) pairs_.push_back({i, j});
  }
  (void)tau_nodes;
}

double TrajectoryTables::node_time(int i) const { return model_->T() * i / (nodes_ - 1); }

double TrajectoryTables::integral(const Pair& pr, double x, double lo, double hi) const {
  const double c = speed_[static_cast<std::size_t>(pr.tau_node)];
  const auto& F = *tables_[static_cast<std::size_t>(pr.t_node)];
  return (F(x + c * hi) - F(x + c * lo)) / c;
}

double TrajectoryTables::min_over_triangle(double x, double lo, double hi, Pair* argmin) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& pr : pairs_) {
    const double v = integral(pr, x, lo, hi);
    if (v < best) {
      best = v;
      if (argmin) *argmin = pr;
    }
  }
  return best;
}

std::pair<double, double> TrajectoryTables::required_range(const CoefficientModel& model, double x_lo,
                                                           double x_hi, double rho) {
  const double reach = model.p() * model.sup_abs_a_p() * rho * (1 + 1e-9) + 1.0;
  return {x_lo - reach, x_hi + reach};
}

namespace {

std::pair<double, double> side_interval(Side s, double rho) {
  switch (s) {
    case Side::full: return {-rho, rho};
    case Side::forward: return {0.0, rho};
    case Side::backward: return {-rho, 0.0};
  }
  return {-rho, rho};
}

struct WindowMax {
  double value;
  double x;
};

// Grid search on [-X, X] followed by local grid refinement around the best node.
WindowMax window_sup(const TrajectoryTables& tab, double X, double step, int rounds, double lo, double hi) {
  auto f = [&](double x) { return tab.min_over_triangle(x, lo, hi); };
  WindowMax best{-std::numeric_limits<double>::infinity(), 0.0};
  auto consider = [&](double x, double v) {
    const double tol = 1e-12 * (1 + std::abs(v));
    if (v > best.value + tol || (std::abs(v - best.value) <= tol && std::abs(x) < std::abs(best.x))) best = {v, x};
  };
  const auto n = static_cast<long>(std::floor(X / step + 1e-9));
  for (long i = -n; i <= n; ++i) consider(step * static_cast<double>(i), f(step * static_cast<double>(i)));
  double h = step;
  for (int r = 0; r < rounds; ++r) {
    const double c = best.x;
    const double sub = h / 10.0;
    for (int i = -10; i <= 10; ++i) {
      const double x = c + sub * i;
      if (std::abs(x) <= X) consider(x, f(x));
    }
    h = sub;
  }
  return best;
}

}  // namespace

ConditionReport check_condition(const CoefficientModel& model, const std::vector<double>& rho_grid,
                                const SearchSpec& spec, Side side) {
  if (rho_grid.empty()) throw DomainError("check_condition: empty rho grid");
  for (std::size_t i = 0; i < rho_grid.size(); ++i) {
    if (!(rho_grid[i] > 0)) throw DomainError("check_condition: radii must be positive");
    if (i && !(rho_grid[i] > rho_grid[i - 1])) throw DomainError("check_condition: radii must increase");
  }
  const double X = spec.x_window;
  const auto range = TrajectoryTables::required_range(model, -X, X, rho_grid.back());
  TrajectoryTables tab(model, spec, range.first, range.second);

  ConditionReport rep;
  rep.side = side;
  rep.rho_grid = rho_grid;
  for (double rho : rho_grid) {
    const auto [lo, hi] = side_interval(side, rho);
    const auto full = window_sup(tab, X, spec.x_step, spec.refine_rounds, lo, hi);
    const auto half = window_sup(tab, X / 2, spec.x_step, spec.refine_rounds, lo, hi);
    rep.sup_integrals.push_back(full.value);
    rep.argmax_x.push_back(full.x);
    rep.half_window_sup.push_back(half.value);
    if (std::abs(full.value - half.value) > spec.sensitivity_tolerance * std::max(1.0, std::abs(full.value)))
      rep.window_sensitive = true;
  }

  std::vector<double> lx;
  for (double r : rho_grid) lx.push_back(std::log1p(r));
  auto [M, N0] = least_squares(lx, rep.sup_integrals);
  if (rho_grid.size() < 2) M = 0.0;
  rep.fitted_M = std::max(0.0, M);
  // envelope intercept: smallest N with sup_integrals <= M log(1+rho) + N everywhere
  double N = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lx.size(); ++i) N = std::max(N, rep.sup_integrals[i] - rep.fitted_M * lx[i]);
  rep.fitted_N = N;
  (void)N0;
  for (double l : lx) rep.bound_values.push_back(rep.fitted_M * l + rep.fitted_N);

  std::vector<double> px, py;
  for (std::size_t i = 0; i < rho_grid.size(); ++i)
    if (rep.sup_integrals[i] > spec.fit_tolerance) {
      px.push_back(std::log(rho_grid[i]));
      py.push_back(std::log(rep.sup_integrals[i]));
    }
  rep.growth_exponent = px.size() >= 2 ? least_squares(px, py).first : 0.0;

  if (rep.growth_exponent >= spec.growth_threshold)
    rep.verdict = Verdict::violated;
  else if (rep.window_sensitive)
    rep.verdict = Verdict::inconclusive;
  else
    rep.verdict = Verdict::holds;
  return rep;
}

}  // namespace pevo::coefficients

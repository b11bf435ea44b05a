#include "pevo/coefficients/lemma1.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pevo/common/errors.hpp"
#include "pevo/common/quadrature.hpp"

namespace pevo::coefficients {

namespace {

double target(double M, int k, double r) { return M * std::log1p(r) + k; }

std::vector<double> scan_order(double X, double step) {
  std::vector<double> ys = {0.0};
  const auto n = static_cast<long>(std::floor(X / step + 1e-9));
  for (long i = 1; i <= n; ++i) {
    ys.push_back(step * static_cast<double>(i));
    ys.push_back(-step * static_cast<double>(i));
  }
  return ys;
}

}  // namespace

std::optional<ViolationWitness> find_violation_seed(const CoefficientModel& model, double M_target, int k,
                                                    const SearchSpec& search) {
  const auto ys = scan_order(search.x_window, search.x_step);
  for (double delta = search.delta_start; delta <= search.delta_max * (1 + 1e-12); delta *= 2) {
    const auto range = TrajectoryTables::required_range(model, -search.x_window, search.x_window, delta);
    TrajectoryTables tab(model, search, range.first, range.second);
    const double need = target(M_target, k, delta);
    for (double y : ys) {
      const double v = tab.min_over_triangle(y, 0.0, delta);
      if (v >= need) return ViolationWitness{y, delta, v};
    }
  }
  return std::nullopt;
}

LemmaOnePoint lemma1_extract(const CoefficientModel& model, double M_target, int k, const ViolationWitness& seed,
                             const SearchSpec& search, const LemmaOneOptions& opts) {
  if (!(seed.delta > 0)) throw SeedInvalidError("seed radius must be positive");
  const auto range = TrajectoryTables::required_range(model, seed.y, seed.y, seed.delta);
  TrajectoryTables tab(model, search, range.first, range.second);

  TrajectoryTables::Pair star{0, 0};
  const double seed_min = tab.min_over_triangle(seed.y, 0.0, seed.delta, &star);
  if (seed_min < target(M_target, k, seed.delta) - opts.tolerance)
    throw SeedInvalidError("seed violates int_0^delta >= M log(1+delta) + k");

  LemmaOnePoint pt;
  pt.k = k;
  pt.M_target = M_target;
  pt.y_k = seed.y;
  pt.delta_k = seed.delta;
  pt.tau_star = tab.node_time(star.tau_node);
  pt.t_star = tab.node_time(star.t_node);

  // F_k(s) = int_0^s Im a_{p-1}(t*, y + p theta a_p(tau*)) dtheta on a uniform grid.
  const double c = model.p() * model.a_p(pt.tau_star);
  const double t_star = pt.t_star;
  auto f = [&](double th) { return model.sub_imag(t_star, seed.y + c * th); };
  const double h0 = std::min(opts.profile_max_step, opts.profile_rel_step * seed.delta);
  const auto cells = static_cast<std::size_t>(std::ceil(seed.delta / h0));
  const double h = seed.delta / static_cast<double>(cells);
  pt.F_profile.reserve(cells + 1);
  pt.F_profile.emplace_back(0.0, 0.0);
  double F = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    const double a = h * static_cast<double>(i), b = h * static_cast<double>(i + 1);
    F += (f(a) + 4 * f(0.5 * (a + b)) + f(b)) * (h / 6.0);
    pt.F_profile.emplace_back(b, F);
  }
  std::size_t imin = 0;
  for (std::size_t i = 1; i < pt.F_profile.size(); ++i)
    if (pt.F_profile[i].second < pt.F_profile[imin].second) imin = i;
  double s_k = pt.F_profile[imin].first;

  if (opts.refine && imin > 0 && imin + 1 < pt.F_profile.size()) {
    // F on [s_{i-1}, s_{i+1}] via Simpson from the left node; golden-section search
    const double a0 = pt.F_profile[imin - 1].first, F0 = pt.F_profile[imin - 1].second;
    auto Fat = [&](double s) { return F0 + simpson(f, a0, s, 64); };
    double a = a0, b = pt.F_profile[imin + 1].first;
    const double g = (std::sqrt(5.0) - 1) / 2;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = Fat(x1), f2 = Fat(x2);
    for (int it = 0; it < 80 && b - a > 1e-13 * (1 + std::abs(b)); ++it) {
      if (f1 < f2) { b = x2; x2 = x1; f2 = f1; x1 = b - g * (b - a); f1 = Fat(x1); }
      else { a = x1; x1 = x2; f1 = f2; x2 = a + g * (b - a); f2 = Fat(x2); }
    }
    const double s_ref = 0.5 * (a + b);
    if (Fat(s_ref) < pt.F_profile[imin].second) s_k = s_ref;
  }

  pt.s_k = s_k;
  pt.x_k = seed.y + c * s_k;
  pt.rho_k = seed.delta - s_k;
  if (!(pt.rho_k > 0)) throw DegenerateError("lemma1_extract: rho_k <= 0");

  // (ii) and (iii) margins on the sampled pairs
  const double need = target(M_target, k, pt.rho_k);
  const auto rcells = static_cast<std::size_t>(std::ceil(pt.rho_k / std::min(0.01, pt.rho_k / 1000)));
  pt.margin_ii = std::numeric_limits<double>::infinity();
  pt.margin_iii = std::numeric_limits<double>::infinity();
  const auto range2 = TrajectoryTables::required_range(model, pt.x_k, pt.x_k, pt.rho_k);
  TrajectoryTables tab2(model, search, range2.first, range2.second);
  for (const auto& pr : tab2.pairs()) {
    const double v = tab2.integral(pr, pt.x_k, 0.0, pt.rho_k) - need;
    double vmin = 0.0;
    for (std::size_t i = 1; i <= rcells; ++i)
      vmin = std::min(vmin, tab2.integral(pr, pt.x_k, 0.0, pt.rho_k * static_cast<double>(i) / static_cast<double>(rcells)));
    pt.margin_ii = std::min(pt.margin_ii, v);
    pt.margin_iii = std::min(pt.margin_iii, vmin);
  }
  // at the realizing pair, directly from the tabulated profile
  {
    const double Fs = simpson(f, 0.0, s_k, simpson_intervals(s_k, h0 / 4));
    pt.margin_ii_star = pt.F_profile.back().second - Fs - need;
    double m3 = 0.0;
    for (const auto& [s, Fv] : pt.F_profile)
      if (s >= s_k) m3 = std::min(m3, Fv - Fs);
    pt.margin_iii_star = m3;
  }
  return pt;
}

std::vector<LemmaOnePoint> lemma1_sequence(const CoefficientModel& model, double M_target,
                                           const std::vector<int>& ks, const SearchSpec& search,
                                           const LemmaOneOptions& opts) {
  std::vector<LemmaOnePoint> out;
  SearchSpec s = search;
  for (int k : ks) {
    // each new seed radius starts above the previous one so rho_k keeps increasing
    if (!out.empty()) s.delta_start = std::max(search.delta_start, 2 * out.back().delta_k);
    const auto seed = find_violation_seed(model, M_target, k, s);
    if (!seed) break;
    out.push_back(lemma1_extract(model, M_target, k, *seed, search, opts));
  }
  return out;
}

}  // namespace pevo::coefficients

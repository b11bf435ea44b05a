#include "pevo/lab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "pevo/coefficients/condition.hpp"
#include "pevo/common/errors.hpp"
#include "pevo/common/quadrature.hpp"
#include "pevo/psdo/quantize.hpp"
#include "pevo/symbols/packet.hpp"
#include "pevo/symbols/seminorm.hpp"

namespace pevo::lab {

using psdo::cplx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::shared_ptr<const symbols::SmoothCutoff> shared_cutoff() {
  static const auto c = std::make_shared<const symbols::SmoothCutoff>();
  return c;
}

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

std::vector<std::pair<int, int>> index_set(int s) {
  std::vector<std::pair<int, int>> out;
  for (int d = 0; d <= s; ++d)
    for (int al = d; al >= 0; --al) out.emplace_back(al, d - al);
  return out;
}

int ExperimentPlan::required_s(double q) const { return symbols::LocalizerFamily::required_s(a, mu, p(), q); }

int ExperimentPlan::s_eff() const {
  int s = 0;
  for (double q : qs) s = std::max(s, required_s(q));
  return std::min(s, s_cap);
}

double ExperimentPlan::n_for(double rho) const { return std::pow(rho, a_eff); }

double ExperimentPlan::horizon(double rho) const { return rho / std::pow(n_for(rho), p() - 1); }

void ExperimentPlan::validate() const {
  symbols::LocalizerFamily::validate_exponents(a, mu, p(), symbols::Regime::asymptotic);
  symbols::LocalizerFamily::validate_exponents(a_eff, mu_eff, p(), symbols::Regime::scaled);
  if (s_cap < 0) throw ConfigError("plan: s_cap must be >= 0");
  if (qs.empty()) throw ConfigError("plan: q list is empty");
  for (double q : qs)
    if (q < 0) throw ConfigError("plan: q must be >= 0");
  if (rhos.empty() && ks.empty()) throw ConfigError("plan: need a rho list or a k list");
  for (double r : rhos) {
    if (!(r >= 1)) throw ConfigError("plan: rho must be >= 1");
    if (horizon(r) > family.T) throw ConfigError("plan: horizon rho/n^{p-1} exceeds T");
  }
  for (std::size_t i = 1; i < rhos.size(); ++i)
    if (!(rhos[i] > rhos[i - 1])) throw ConfigError("plan: rho list must be increasing");
  if (checkpoint_fractions.empty() || checkpoint_fractions.front() != 0.0 || checkpoint_fractions.back() != 1.0)
    throw ConfigError("plan: checkpoint fractions must start at 0 and end at 1");
  for (std::size_t i = 1; i < checkpoint_fractions.size(); ++i)
    if (!(checkpoint_fractions[i] > checkpoint_fractions[i - 1]))
      throw ConfigError("plan: checkpoint fractions must increase");
  if (!(L > 0) || !(oversampling >= 1)) throw ConfigError("plan: need L > 0 and oversampling >= 1");
  if (A_s < 0 || c1 < 0) throw ConfigError("plan: A_s and c1 must be >= 0");
  if (parallel < 1) throw ConfigError("plan: parallel must be >= 1");
  solver.validate();
}

FitLine fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  FitLine f;
  f.points = x.size();
  const auto [slope, icpt] = coefficients::least_squares(x, y);
  f.slope = slope;
  f.intercept = icpt;
  for (std::size_t i = 0; i < x.size(); ++i) f.rss += std::pow(y[i] - (icpt + slope * x[i]), 2);
  return f;
}

std::vector<double> localize_solution(const symbols::LocalizerFamily& fam, const psdo::FieldState& u,
                                      const std::vector<std::pair<int, int>>& indices, LocalProfile* v00) {
  psdo::check_aliasing(u);
  const auto& g = u.grid();
  const std::size_t N = g.N();
  const double t = u.t();
  const auto& cut = fam.cutoff();
  int amax = 1, bmax = 0;
  for (const auto& [al, be] : indices) {
    amax = std::max(amax, al);
    bmax = std::max(bmax, be);
  }
  if (amax > cut.d_max() || bmax > cut.d_max()) throw OrderError("localize_solution: index exceeds cutoff order");

  const auto hull = fam.x_support(t);
  if (hull.lo < g.x(0) || hull.hi > g.x(N - 1)) throw DomainError("localize_solution: support leaves the box");
  const double rho = fam.rho();
  const double dx = 1.0 / (kLocalSamples * rho);
  const double x0 = hull.lo;
  const auto rows = static_cast<std::size_t>(std::ceil((hull.hi - hull.lo) / dx)) + 1;
  const std::size_t K = indices.size();
  std::vector<cplx> acc(rows * K);
  std::vector<cplx> dacc(v00 ? rows : 0);
  std::size_t q0 = K;
  for (std::size_t q = 0; q < K; ++q)
    if (indices[q] == std::pair<int, int>{0, 0}) q0 = q;
  if (v00 && q0 == K) throw DomainError("localize_solution: v00 requested without index (0,0)");

  const auto xs = fam.xi_support();
  const int p = fam.p();
  const double shift = p * fam.A_p(t);
  const double w = g.dxi() / (2 * std::numbers::pi) * std::sqrt(rho);
  const auto& uh = u.spectrum();
  std::vector<double> hx(static_cast<std::size_t>(amax + 1)), hk(static_cast<std::size_t>(bmax + 1));
  for (std::size_t i = 0; i < N; ++i) {
    const double xi = g.xi(i);
    if (!(xi > xs.lo && xi < xs.hi) || uh[i] == cplx{}) continue;
    const double Xi = fam.xi_argument(xi);
    if (std::abs(Xi) >= 0.5) continue;
    cut.derivatives(Xi, hk);
    const double c = fam.x_k() + shift * std::pow(xi, p - 1);
    // rows with |rho (x - c)| < 1/2
    const auto a = std::max<long>(0, static_cast<long>(std::ceil((c - 0.5 / rho - x0) / dx)));
    const auto b = std::min<long>(static_cast<long>(rows) - 1, static_cast<long>(std::floor((c + 0.5 / rho - x0) / dx)));
    if (a > b) continue;
    const cplx ui = w * uh[i];
    // e^{i x xi} by recurrence along the rows, reseeded every 64 rows
    const cplx rot = std::polar(1.0, dx * xi);
    cplx ph{};
    for (long j = a; j <= b; ++j) {
      const double x = x0 + dx * static_cast<double>(j);
      if ((j - a) % 64 == 0) ph = std::polar(1.0, x * xi);
      const double X = rho * (x - c);
      if (std::abs(X) < 0.5) {
        cut.derivatives(X, hx);
        const cplx term = ph * ui;
        cplx* row = &acc[static_cast<std::size_t>(j) * K];
        for (std::size_t q = 0; q < K; ++q)
          row[q] += term * (hx[static_cast<std::size_t>(indices[q].first)] * hk[static_cast<std::size_t>(indices[q].second)]);
        // D (e^{i x xi} h(X)) = e^{i x xi} (xi h(X) - i rho h'(X))
        if (v00) dacc[static_cast<std::size_t>(j)] += term * hk[0] * cplx(xi * hx[0], -rho * hx[1]);
      }
      ph *= rot;
    }
  }

  std::vector<double> out(K);
  for (std::size_t q = 0; q < K; ++q) {
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r) s += std::norm(acc[r * K + q]);
    out[q] = s > 0 ? u.log_scale() + 0.5 * std::log(dx * s) : -kInf;
  }
  if (v00) {
    v00->x0 = x0;
    v00->dx = dx;
    v00->v.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) v00->v[r] = acc[r * K + q0];
    v00->dv = std::move(dacc);
  }
  return out;
}

double GrowthRecord::bk_margin() const {
  double m = kInf;
  for (std::size_t c = 0; c < log_sigma.size() && c < bk.size(); ++c)
    m = std::min(m, log_sigma[c] - log_sigma.front() - bk[c]);
  return m;
}

double log_sigma(const std::vector<double>& log_norms, const std::vector<std::pair<int, int>>& indices,
                 double weight) {
  double out = -kInf;
  const double lw = std::log(weight);
  for (std::size_t q = 0; q < indices.size(); ++q)
    out = log_add(out, log_norms[q] + (indices[q].first + indices[q].second) * lw);
  return out;
}

double bk_integral(const coefficients::CoefficientModel& model, double x_k, double rho, double n, double A_s,
                   double t) {
  if (t < 0 || t > model.T()) throw DomainError("bk_integral: t outside [0, T]");
  const int p = model.p();
  const double np1 = std::pow(n, p - 1);
  auto f = [&](double th) { return model.sub_imag(th, x_k + p * model.A_p(th) * np1) * np1; };
  // resolve the trajectory at spacing <= 1e-3 in the rescaled time n^{p-1} t
  const std::size_t m = simpson_intervals(t * np1, 1e-3);
  const double I = t > 0 ? simpson(f, 0.0, t, m) : 0.0;
  return I - A_s * (1 + np1 / rho) * t;
}

BkBookkeeping bk_bookkeeping(const coefficients::CoefficientModel& model, const coefficients::LemmaOnePoint& pt,
                             const ExperimentPlan& plan, std::size_t samples) {
  BkBookkeeping b;
  b.rho = pt.rho_k;
  b.n = plan.n_for(pt.rho_k);
  b.t_k = plan.horizon(pt.rho_k);
  if (b.t_k > model.T()) throw DomainError("bk_bookkeeping: horizon exceeds T");
  b.end_bound = pt.M_target * std::log1p(pt.rho_k) + pt.k - 2 * plan.A_s;
  const int p = model.p();
  const double np1 = std::pow(b.n, p - 1);
  auto f = [&](double th) {
    return model.sub_imag(th, pt.x_k + p * model.A_p(th) * np1) * np1 - plan.A_s * (1 + np1 / pt.rho_k);
  };
  // Simpson on each of `samples` cells, each cell resolved at <= 1e-3 in n^{p-1} t
  const double h = b.t_k / static_cast<double>(samples);
  const std::size_t m = simpson_intervals(h * np1, 1e-3);
  double acc = 0.0;
  b.tau.push_back(0.0);
  b.partial.push_back(0.0);
  for (std::size_t i = 0; i < samples; ++i) {
    acc += simpson(f, h * static_cast<double>(i), h * static_cast<double>(i + 1), m);
    b.tau.push_back(h * static_cast<double>(i + 1));
    b.partial.push_back(acc);
  }
  b.end = acc;
  b.min_partial = *std::min_element(b.partial.begin(), b.partial.end());
  return b;
}

GrowthRecord run_point(const ExperimentPlan& plan, const coefficients::CoefficientModel& model, int k, double rho,
                       double x_k) {
  GrowthRecord r;
  r.k = k;
  r.rho = rho;
  r.x_k = x_k;
  r.n = plan.n_for(rho);
  r.t_k = plan.horizon(rho);
  const int p = model.p();
  if (r.t_k > model.T()) throw DomainError("run_point: horizon exceeds T");

  auto grid = psdo::SymbolGrid2D::for_frequency(plan.L, 2 * r.n, plan.oversampling);
  r.N = grid.N();
  if (grid.N() > plan.max_N)
    throw ResourceError("run_point: grid of " + std::to_string(grid.N()) + " nodes exceeds the configured maximum");
  auto gptr = grid.share();
  const auto cutoff = shared_cutoff();
  const auto profile = symbols::build_packet_profile(cutoff, *gptr);
  const auto g = solver::build_wavepacket(profile, x_k, r.n, gptr, plan.guard);

  for (double f : plan.checkpoint_fractions) r.t.push_back(f * r.t_k);
  std::vector<double> cps(r.t.begin() + 1, r.t.end());
  auto cfg = plan.solver;
  cfg.guard = plan.guard;
  auto sol = solver::solve_cauchy(model, g, cps, cfg);
  r.max_wrap_fraction = sol.max_wrap_fraction;
  std::vector<psdo::FieldState> states;
  states.push_back(g);
  for (auto& s : sol.checkpoints) states.push_back(std::move(s));

  symbols::LocalizerParams par;
  par.x_k = x_k;
  par.rho = rho;
  par.a = plan.a_eff;
  par.mu = plan.mu_eff;
  par.s = plan.s_eff();
  par.regime = symbols::Regime::scaled;
  auto mptr = std::shared_ptr<const coefficients::CoefficientModel>(&model, [](const auto*) {});
  symbols::LocalizerFamily fam(mptr, cutoff, par);
  r.indices = index_set(par.s);
  r.weight = fam.weight();
  r.tail_weight = std::pow(r.weight, par.s + 1);
  r.sigma0_floor = cutoff->l2_norm();

  const double np1 = std::pow(r.n, p - 1);
  LocalProfile v00;
  for (const auto& u : states) {
    auto ln = localize_solution(fam, u, r.indices, &v00);
    r.log_sigma.push_back(log_sigma(ln, r.indices, r.weight));
    r.log_norms.push_back(std::move(ln));
    r.bk.push_back(bk_integral(model, x_k, rho, r.n, plan.A_s, u.t()));
    // Hamiltonian drift of the localized piece, and ||D v|| / (n ||v||)
    double m0 = 0, m1 = 0, s1 = 0;
    for (std::size_t j = 0; j < v00.v.size(); ++j) {
      const double e = std::norm(v00.v[j]);
      m0 += e;
      m1 += e * (v00.x0 + v00.dx * static_cast<double>(j));
      s1 += std::norm(v00.dv[j]);
    }
    const double target = x_k + p * model.A_p(u.t()) * np1;
    r.drift_error.push_back(m0 > 0 ? std::abs(m1 / m0 - target) : kInf);
    r.d1_ratio.push_back(m0 > 0 ? std::sqrt(s1 / m0) / r.n : 0.0);
  }
  std::vector<double> tt(r.t.begin() + 1, r.t.end()), ll(r.log_sigma.begin() + 1, r.log_sigma.end());
  r.growth_rate = fit_line(tt, ll).slope;
  return r;
}

namespace {

double crossover(const FitLine& f, double M) {
  if (!(f.slope > 0)) return kInf;
  // smallest rho on a fine geometric scan with intercept + slope rho > M log(1 + rho)
  for (double r = 1.0; r < 1e8; r *= 1.001)
    if (f.intercept + f.slope * r > M * std::log1p(r)) return r;
  return kInf;
}

}  // namespace

DichotomyResult run_dichotomy_experiment(const ExperimentPlan& plan) {
  plan.validate();
  const auto model = coefficients::make_family(plan.family);
  DichotomyResult res;
  res.family = plan.family.name;
  res.p = model.p();

  struct Point {
    int k;
    double rho, x_k;
    std::optional<coefficients::LemmaOnePoint> lemma;
  };
  std::vector<Point> pts;
  const std::size_t npts = plan.rhos.empty() ? plan.ks.size() : plan.rhos.size();
  bool witness = false;
  for (std::size_t i = 0; i < npts; ++i) {
    Point pt;
    pt.k = i < plan.ks.size() ? plan.ks[i] : static_cast<int>(i + 1);
    const auto seed = coefficients::find_violation_seed(model, plan.M_target, pt.k);
    if (seed) {
      witness = true;
      pt.lemma = coefficients::lemma1_extract(model, plan.M_target, pt.k, *seed);
    }
    if (plan.rhos.empty()) {
      if (!pt.lemma) continue;  // no violating point: nothing to solve at this k
      pt.rho = pt.lemma->rho_k;
      pt.x_k = pt.lemma->x_k;
    } else {
      pt.rho = plan.rhos[i];
      pt.x_k = plan.x_center;
      if (plan.xk_mode == XkMode::argmax) {
        coefficients::SearchSpec spec;
        const auto rep = coefficients::check_condition(model, {pt.rho}, spec, coefficients::Side::forward);
        pt.x_k = rep.argmax_x.front();
      }
    }
    pts.push_back(pt);
  }
  res.verdict = witness ? "violated" : "holds";

  res.records.resize(pts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < pts.size(); i = next++) {
      try {
        res.records[i] = run_point(plan, model, pts[i].k, pts[i].rho, pts[i].x_k);
      } catch (const Error& e) {
        GrowthRecord r;
        r.k = pts[i].k;
        r.rho = pts[i].rho;
        r.x_k = pts[i].x_k;
        r.n = plan.n_for(pts[i].rho);
        r.t_k = plan.horizon(pts[i].rho);
        r.error = e.what();
        res.records[i] = std::move(r);
      }
      res.records[i].lemma = pts[i].lemma;
    }
  };
  const int nthreads = std::min<int>(plan.parallel, static_cast<int>(pts.size()));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<double> rho, lrho, growth, lend;
  for (const auto& r : res.records) {
    if (!r.ok()) continue;
    rho.push_back(r.rho);
    lrho.push_back(std::log(r.rho));
    growth.push_back(r.log_growth());
    lend.push_back(r.log_sigma.back());
  }
  res.lower = fit_line(rho, growth);
  res.upper = fit_line(lrho, lend);
  res.exp_class = fit_line(rho, lend);
  const double floor = 1e-12;
  res.class_lr = std::pow(std::max(res.upper.rss, floor) / std::max(res.exp_class.rss, floor),
                          0.5 * static_cast<double>(rho.size()));
  res.growth_class = res.class_lr > 1 ? "exponential" : "polynomial";

  for (double q : plan.qs) {
    QVerdict v;
    v.q = q;
    v.threshold_M = 0.5 + 2 + plan.a_eff * q;
    v.slope_bound = v.threshold_M + 0.5;
    v.slope_within_bound = rho.size() >= 2 && res.upper.slope <= v.slope_bound;
    if (!growth.empty()) v.observed = growth.back() > v.threshold_M * std::log1p(rho.back());
    v.crossover_rho = rho.size() >= 2 ? crossover(res.lower, v.threshold_M) : kInf;
    v.extrapolated = res.growth_class == "exponential" && std::isfinite(v.crossover_rho);
    res.contradiction = res.contradiction || v.extrapolated;
    res.q_verdicts.push_back(v);
  }
  return res;
}

SeparationTest separation_test(const DichotomyResult& a, const DichotomyResult& b, double rss_floor) {
  SeparationTest st;
  std::vector<double> xa, ya, xb, yb;
  for (const auto& r : a.records)
    if (r.ok()) { xa.push_back(r.rho); ya.push_back(r.log_growth()); }
  for (const auto& r : b.records)
    if (r.ok()) { xb.push_back(r.rho); yb.push_back(r.log_growth()); }
  st.points = xa.size() + xb.size();
  if (xa.size() < 2 || xb.size() < 2) throw DegenerateError("separation_test: need two points per family");
  st.first = fit_line(xa, ya);
  st.second = fit_line(xb, yb);
  st.rss1 = st.first.rss + st.second.rss;
  // common slope with per-family intercepts: pool the centred data
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double e : v) s += e;
    return s / static_cast<double>(v.size());
  };
  const double mxa = mean(xa), mya = mean(ya), mxb = mean(xb), myb = mean(yb);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xa.size(); ++i) { sxx += std::pow(xa[i] - mxa, 2); sxy += (xa[i] - mxa) * (ya[i] - mya); }
  for (std::size_t i = 0; i < xb.size(); ++i) { sxx += std::pow(xb[i] - mxb, 2); sxy += (xb[i] - mxb) * (yb[i] - myb); }
  const double slope = sxx > 0 ? sxy / sxx : 0.0;
  st.common.slope = slope;
  st.common.points = st.points;
  for (std::size_t i = 0; i < xa.size(); ++i) st.rss0 += std::pow(ya[i] - mya - slope * (xa[i] - mxa), 2);
  for (std::size_t i = 0; i < xb.size(); ++i) st.rss0 += std::pow(yb[i] - myb - slope * (xb[i] - mxb), 2);
  st.common.rss = st.rss0;
  st.lr = std::pow(std::max(st.rss0, rss_floor) / std::max(st.rss1, rss_floor), 0.5 * static_cast<double>(st.points));
  return st;
}

double measure_noise_floor_As(const DichotomyResult& zero_family) {
  double A = 0.0;
  for (const auto& r : zero_family.records) {
    if (!r.ok()) continue;
    const double np1 = std::pow(r.n, zero_family.p - 1);
    for (std::size_t i = 1; i < r.t.size(); ++i)
      A = std::max(A, std::abs(r.log_sigma[i] - r.log_sigma[0]) / ((1 + np1 / r.rho) * r.t[i]));
  }
  return A;
}

double measure_c1(const ExperimentPlan& plan, int r_max) {
  const auto model = std::make_shared<const coefficients::CoefficientModel>(coefficients::make_family(plan.family));
  double c1 = 0.0;
  for (double rho : plan.rhos) {
    symbols::LocalizerParams par;
    par.rho = rho;
    par.a = plan.a_eff;
    par.mu = plan.mu_eff;
    par.regime = symbols::Regime::scaled;
    symbols::LocalizerFamily fam(model, shared_cutoff(), par);
    const auto chi = fam.chi1_symbol();
    const auto sup = chi.xi_support();
    symbols::GridSample smp{{-1, 1}, {sup.lo, sup.hi}, 3, 2001};
    for (int r = 0; r <= r_max; ++r) {
      const auto s = symbols::seminorm(symbols::Symbol::xi_power_times(r, chi), 2, 2, smp);
      c1 = std::max(c1, s.value / std::pow(fam.n(), r));
    }
  }
  return c1;
}

}  // namespace pevo::lab

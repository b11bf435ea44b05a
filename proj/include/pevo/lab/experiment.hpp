#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pevo/coefficients/families.hpp"
#include "pevo/coefficients/lemma1.hpp"
#include "pevo/lab/frozen.hpp"
#include "pevo/psdo/field.hpp"
#include "pevo/solver/cauchy.hpp"
#include "pevo/symbols/localizer.hpp"

namespace pevo::lab {

// (alpha, beta) pairs with alpha + beta <= s, ordered by total degree then alpha descending.
std::vector<std::pair<int, int>> index_set(int s);

enum class XkMode { center, argmax };

struct ExperimentPlan {
  coefficients::FamilySpec family;
  double M_target = 1.0;
  std::vector<int> ks = {1, 2, 3};
  // Explicit radii for the solve sweep; empty means radii come from Lemma 1 points.
  std::vector<double> rhos = {4.0, 8.0, 16.0};
  std::vector<double> qs = {0.0, 1.0, 2.0};
  // asymptotic exponents, used for the symbolic bookkeeping and the required s
  double a = 5.0, mu = 3.5;
  // scale-substituted exponents driving the solves
  double a_eff = 2.2, mu_eff = 1.1;
  int s_cap = 4;
  XkMode xk_mode = XkMode::center;
  double x_center = 0.0;
  // grid sizing: box [-L, L), max |xi| >= oversampling * 2n
  double L = 400.0;
  double oversampling = 1.0;
  double guard = 1.0 / 3.0;
  std::size_t max_N = std::size_t{1} << 22;
  std::vector<double> checkpoint_fractions = {0.0, 0.25, 0.5, 0.75, 0.875, 0.9375, 1.0};
  double A_s = frozen::A_s;
  double c1 = frozen::c1;
  int parallel = 1;
  solver::SolverConfig solver;

  int p() const { return family.p; }
  // s from the asymptotic exponents at probe q
  int required_s(double q) const;
  int s_eff() const;
  double n_for(double rho) const;
  double horizon(double rho) const;  // t_k = rho / n^{p-1}
  void validate() const;
};

struct GrowthRecord {
  int k = 0;
  double rho = 0.0, n = 0.0, x_k = 0.0, t_k = 0.0;
  std::size_t N = 0;
  std::vector<std::pair<int, int>> indices;
  std::vector<double> t;
  std::vector<std::vector<double>> log_norms;  // [checkpoint][index]: log ||v^{alpha,beta}(t)||
  std::vector<double> log_sigma;               // log sigma_k(t)
  std::vector<double> bk;                      // int_0^t B_k
  std::vector<double> drift_error;             // |center of mass of v^{0,0} - (x_k + p A_p(t) n^{p-1})|
  std::vector<double> d1_ratio;                // ||D v^{0,0}|| / (n ||v^{0,0}||)
  double growth_rate = 0.0;                    // slope of log sigma against t, first checkpoint excluded
  double weight = 0.0;                         // rho^{mu+1}/n at the solve exponents
  double tail_weight = 0.0;                    // weight^{s_eff+1}, bound on each discarded index weight
  double sigma0_floor = 0.0;                   // ||h||
  double max_wrap_fraction = 0.0;
  std::optional<coefficients::LemmaOnePoint> lemma;
  std::string error;  // nonempty when the point was skipped
  bool ok() const { return error.empty(); }
  double log_growth() const { return log_sigma.back() - log_sigma.front(); }
  // log(||v^q(t_k)|| / ||v^q(0)||) for a single index
  double index_log_growth(std::size_t q) const { return log_norms.back().at(q) - log_norms.front().at(q); }
  // min over checkpoints of log(sigma(t)/sigma(0)) - int_0^t B_k; >= 0 when sigma obeys the B_k lower bound
  double bk_margin() const;
};

struct FitLine {
  double slope = 0.0, intercept = 0.0, rss = 0.0;
  std::size_t points = 0;
};

FitLine fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct QVerdict {
  double q = 0.0;
  double threshold_M = 0.0;        // 1/2 + 2 + a_eff q
  double slope_bound = 0.0;        // threshold_M + 1/2
  bool slope_within_bound = false;  // log-log slope of sigma(t_k) <= slope_bound
  bool observed = false;           // sigma(t_k)/sigma(0) > (1 + rho)^M at the largest rho
  double crossover_rho = 0.0;      // extrapolated rho beyond which e^{fit} exceeds (1 + rho)^M; inf if none
  bool extrapolated = false;
};

struct DichotomyResult {
  std::string family;
  int p = 2;
  std::vector<GrowthRecord> records;
  FitLine lower;      // log(sigma(t_k)/sigma(0)) against rho
  FitLine upper;      // log sigma(t_k) against log rho
  FitLine exp_class;  // log sigma(t_k) against rho
  double class_lr = 0.0;  // (RSS_poly / RSS_exp)^{N/2}; > 1 favours exponential growth
  std::string growth_class;
  std::string verdict;  // "violated" when a Lemma 1 style witness was found, "holds" otherwise
  std::vector<QVerdict> q_verdicts;
  bool contradiction = false;  // any q with an extrapolated crossover
};

// v^{0,0} and D v^{0,0} on the uniform local sample x_m = x0 + m dx
struct LocalProfile {
  double x0 = 0.0, dx = 0.0;
  std::vector<psdo::cplx> v, dv;
};

// Samples per unit of the window variable rho (x - c); resolves h^{(alpha)}, alpha <= 4, to ~1e-9 in L2.
inline constexpr int kLocalSamples = 512;

// log ||op(w^{alpha,beta}(t)) u|| for every index (t = u.t()); -inf for an exactly vanishing result.
// The trigonometric interpolant of u is evaluated on a local grid of spacing 1/(kLocalSamples rho)
// over the x-support hull, independent of the solver grid. Profiles exclude u's log scale.
std::vector<double> localize_solution(const symbols::LocalizerFamily& fam, const psdo::FieldState& u,
                                      const std::vector<std::pair<int, int>>& indices,
                                      LocalProfile* v00 = nullptr);

// log sigma from per-index log norms with weights (rho^{mu+1}/n)^{alpha+beta}
double log_sigma(const std::vector<double>& log_norms, const std::vector<std::pair<int, int>>& indices,
                 double weight);

// int_0^t B_k, B_k(th) = Im a_{p-1}(th, x_k + p A_p(th) n^{p-1}) n^{p-1} - A_s (1 + n^{p-1}/rho)
double bk_integral(const coefficients::CoefficientModel& model, double x_k, double rho, double n, double A_s,
                   double t);

// int_0^tau B_k on a uniform grid over [0, t_k] for a Lemma 1 point, n = rho_k^{a_eff}
struct BkBookkeeping {
  double rho = 0.0, n = 0.0, t_k = 0.0;
  double end = 0.0;          // int_0^{t_k} B_k
  double min_partial = 0.0;  // min over sampled tau of int_0^tau B_k (tau = 0 included)
  double end_bound = 0.0;    // M_target log(1 + rho_k) + k - 2 A_s
  std::vector<double> tau, partial;
};

BkBookkeeping bk_bookkeeping(const coefficients::CoefficientModel& model, const coefficients::LemmaOnePoint& pt,
                             const ExperimentPlan& plan, std::size_t samples = 512);

GrowthRecord run_point(const ExperimentPlan& plan, const coefficients::CoefficientModel& model, int k, double rho,
                       double x_k);

DichotomyResult run_dichotomy_experiment(const ExperimentPlan& plan);

struct SeparationTest {
  FitLine common, first, second;
  double rss0 = 0.0, rss1 = 0.0;
  double lr = 0.0;  // (RSS0 / RSS1)^{N/2}
  std::size_t points = 0;
};

// H0: one slope of log(sigma(t_k)/sigma(0)) against rho for both families (separate intercepts);
// H1: separate slopes. Gaussian likelihood ratio with the residual variance profiled out.
SeparationTest separation_test(const DichotomyResult& a, const DichotomyResult& b, double rss_floor = 1e-12);

// max over records and checkpoints t > 0 of |log(sigma(t)/sigma(0))| / ((1 + n^{p-1}/rho) t)
double measure_noise_floor_As(const DichotomyResult& zero_family);

// max over rho and r <= r_max of |chi_1 xi^r|_{2,2} / n^r at the solve exponents
double measure_c1(const ExperimentPlan& plan, int r_max = 2);

}  // namespace pevo::lab

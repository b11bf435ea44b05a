#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "pevo/coefficients/condition.hpp"

namespace pevo::coefficients {

// (y_k, delta_k) with int_0^delta Im a_{p-1}(t, y + p a_p(tau) theta) >= M log(1+delta) + k
// for every sampled pair tau <= t.
struct ViolationWitness {
  double y = 0.0;
  double delta = 0.0;
  double min_integral = 0.0;  // min over the triangle of int_0^delta
};

struct LemmaOnePoint {
  int k = 0;
  double M_target = 0.0;
  double y_k = 0.0, delta_k = 0.0;
  double s_k = 0.0;
  double x_k = 0.0;
  double rho_k = 0.0;
  double tau_star = 0.0, t_star = 0.0;
  std::vector<std::pair<double, double>> F_profile;  // (s, F_k(s)) on [0, delta_k]
  // min over sampled pairs of int_0^{rho_k} minus M log(1+rho_k) + k
  double margin_ii = 0.0;
  // min over sampled pairs and rho in [0, rho_k] of int_0^rho
  double margin_iii = 0.0;
  // margins at the realizing pair only
  double margin_ii_star = 0.0;
  double margin_iii_star = 0.0;
};

struct LemmaOneOptions {
  double tolerance = 1e-8;
  double profile_max_step = 0.01;   // grid spacing for F_k: min(0.01, delta/1000)
  double profile_rel_step = 1e-3;
  bool refine = true;               // golden-section refinement of the grid minimizer
};

std::optional<ViolationWitness> find_violation_seed(const CoefficientModel& model, double M_target, int k,
                                                    const SearchSpec& search = {});

LemmaOnePoint lemma1_extract(const CoefficientModel& model, double M_target, int k, const ViolationWitness& seed,
                             const SearchSpec& search = {}, const LemmaOneOptions& opts = {});

// Seeds and points for each k in ks; stops at the first k with no seed.
std::vector<LemmaOnePoint> lemma1_sequence(const CoefficientModel& model, double M_target,
                                           const std::vector<int>& ks, const SearchSpec& search = {},
                                           const LemmaOneOptions& opts = {});

}  // namespace pevo::coefficients

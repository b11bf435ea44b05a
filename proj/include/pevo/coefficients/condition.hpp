#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "pevo/coefficients/model.hpp"

namespace pevo::coefficients {

struct QuadratureSpec {
  double max_step = 0.01;       // node spacing <= min(max_step, relative_step * width)
  double relative_step = 1e-3;
};

// int_{rho_lo}^{rho_hi} Im a_{p-1}(t, x + p a_p(tau) theta) d theta, composite Simpson.
double trajectory_integral(const CoefficientModel& model, double x, double t, double tau, double rho_lo,
                           double rho_hi, const QuadratureSpec& quad = {});

// full: [-rho, rho]; forward (A side): [0, rho]; backward (B side): [-rho, 0]
enum class Side { full, forward, backward };
enum class Verdict { holds, violated, inconclusive };

std::string to_string(Side s);
std::string to_string(Verdict v);
Side side_from_string(const std::string& s);

struct SearchSpec {
  double x_window = 100.0;
  double x_step = 0.05;
  int triangle_nodes = 33;
  double table_step = 0.01;
  int refine_rounds = 3;
  double growth_threshold = 0.5;   // log-log slope marking superlogarithmic growth
  double fit_tolerance = 1e-6;
  double sensitivity_tolerance = 1e-6;
  // seed search
  double delta_start = 1.0;
  double delta_max = 1024.0;
};

struct ConditionReport {
  Side side = Side::full;
  std::vector<double> rho_grid;
  std::vector<double> sup_integrals;
  std::vector<double> argmax_x;
  std::vector<double> half_window_sup;
  std::vector<double> bound_values;  // fitted_M log(1+rho) + fitted_N
  double fitted_M = 0.0;
  double fitted_N = 0.0;
  double growth_exponent = 0.0;  // log-log slope of the positive sup_integrals
  bool window_sensitive = false;
  Verdict verdict = Verdict::holds;
};

// Antiderivative tables of y -> Im a_{p-1}(t_j, y) on the triangle t-nodes,
// giving trajectory integrals in O(1) via (F(x + c hi) - F(x + c lo)) / c.
class TrajectoryTables {
 public:
  TrajectoryTables(const CoefficientModel& model, const SearchSpec& spec, double y_lo, double y_hi);

  struct Pair {
    int tau_node, t_node;
  };

  const std::vector<Pair>& pairs() const { return pairs_; }
  double node_time(int i) const;
  double integral(const Pair& pr, double x, double lo, double hi) const;
  // min over sampled pairs; optionally reports the realizing pair
  double min_over_triangle(double x, double lo, double hi, Pair* argmin = nullptr) const;

  // y-range needed to evaluate trajectories from [x_lo, x_hi] with |theta| <= rho
  static std::pair<double, double> required_range(const CoefficientModel& model, double x_lo, double x_hi,
                                                  double rho);

 private:
  const CoefficientModel* model_;
  int nodes_;
  std::vector<double> speed_;  // p a_p(tau_i)
  std::vector<std::shared_ptr<const PrimitiveTable<double>>> tables_;
  std::vector<Pair> pairs_;
};

ConditionReport check_condition(const CoefficientModel& model, const std::vector<double>& rho_grid,
                                const SearchSpec& spec = {}, Side side = Side::full);

// Least-squares line y = slope x + intercept; returns {slope, intercept}.
std::pair<double, double> least_squares(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pevo::coefficients

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pevo/psdo/field.hpp"
#include "pevo/psdo/quantize.hpp"
#include "pevo/symbols/seminorm.hpp"
#include "pevo/symbols/symbol.hpp"

namespace pevo::psdo {

// Uniform doubles in [0, 1) from std::mt19937_64 (fully specified, so portable).
class ProbeRng {
 public:
  explicit ProbeRng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 gen_;
};

// Random band-limited fields: probe i has random complex modes on a random sub-band of
// `band` (intersected with the retained band |xi| <= (1 - guard) xi_max).
std::vector<FieldState> make_probe_corpus(std::shared_ptr<const SymbolGrid2D> grid, int count, std::uint64_t seed,
                                          symbols::Interval band = {}, double guard = 1.0 / 3.0);

struct CvReport {
  double max_op_ratio = 0.0;  // max ||op(p) u|| / ||u||
  double seminorm = 0.0;      // sampled |p|_{2,2}
  double ratio = 0.0;         // max_op_ratio / seminorm
  int probes = 0;
  std::uint64_t seed = 0;
  symbols::SeminormReport seminorm_report;
};

CvReport cv_bound_harness(const symbols::Symbol& p, const std::vector<FieldState>& probes,
                          const symbols::GridSample& sample, std::uint64_t seed = 0);

// p_theta(x_j, xi_i) = sum_eta p1(x_j, xi_i + theta eta) Q_hat(eta) dxi/2pi, where Q_hat is the
// transform of y -> p2(x_j + y, xi_i) (periodic in y). Rows are x nodes, columns xi nodes i_lo..i_hi.
Eigen::MatrixXcd oscillatory_product(const symbols::Symbol& p1, const symbols::Symbol& p2, double theta,
                                     const SymbolGrid2D& grid, std::size_t i_lo, std::size_t i_hi);

// sup over interior columns of |d_xi^g d_x^s P| for g, s <= ell (x: spectral, xi: centered differences)
double grid_seminorm(const Eigen::MatrixXcd& P, int ell, const SymbolGrid2D& grid);

struct TheoremBReport {
  double theta = 0.0;
  int ell = 0;
  double p_theta_seminorm = 0.0;
  double p1_seminorm = 0.0;  // |p1|_{ell+2, ell+2}
  double p2_seminorm = 0.0;
  double ratio = 0.0;
};

TheoremBReport theorem_b_check(const symbols::Symbol& p1, const symbols::Symbol& p2, double theta, int ell,
                               const SymbolGrid2D& grid, std::size_t i_lo, std::size_t i_hi,
                               const symbols::GridSample& sample);

}  // namespace pevo::psdo

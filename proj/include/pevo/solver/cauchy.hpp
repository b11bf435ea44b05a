#pragma once

#include <memory>
#include <vector>

#include "pevo/coefficients/model.hpp"
#include "pevo/psdo/field.hpp"
#include "pevo/symbols/packet.hpp"

namespace pevo::solver {

using psdo::cplx;
using psdo::FieldState;

enum class IntegratingFactor {
  full_background,  // exp(-i (A_p xi^p + sum_j int b_j xi^j)), b_j = x-independent part of a_j
  principal_only    // exp(-i A_p xi^p); every lower-order term goes through the RK stages
};

struct SolverConfig {
  double dt = 0.0;        // 0: dt = c_step / (max_j sup|a_j| n_max^{p-1})
  double c_step = 0.5;
  int order = 4;
  IntegratingFactor factor = IntegratingFactor::full_background;
  double guard = 1.0 / 3.0;       // retained band |xi| <= (1 - guard) xi_max
  double wrap_threshold = 1e-8;   // allowed mass fraction in the outer wrap band
  double wrap_band = 0.1;         // monitored fraction of the box at each end
  double n_max = 0.0;             // 0: (1 - guard) xi_max
  bool check_instability = true;
  bool check_wrap = true;
  double log_overflow = 690.0;    // abort when log ||u|| exceeds this

  void validate() const;
};

struct SolveResult {
  std::vector<FieldState> checkpoints;  // in the order requested
  std::vector<double> log_norms;
  double dt = 0.0;
  std::size_t steps = 0;
  double max_wrap_fraction = 0.0;
  double kappa = 0.0;  // instability growth bound used
};

// Solves i d_t u = (a_p(t) D^p + sum_j a_j(t, x) D^j) u from g (at g.t()) through the
// checkpoint times, which must be monotone in one direction away from g.t().
SolveResult solve_cauchy(const coefficients::CoefficientModel& model, const FieldState& g,
                         const std::vector<double>& checkpoints, const SolverConfig& cfg = {});

// Exact multiplier solution for x-independent coefficients.
FieldState constant_coefficient_oracle(const coefficients::CoefficientModel& model, const FieldState& g, double t);

// g(x) = exp(i (x - x_k) n) psi(x - x_k), assembled from g_hat(xi) = exp(-i x_k xi) psi_hat(xi - n).
FieldState build_wavepacket(const symbols::PacketProfile& profile, double x_k, double n,
                            std::shared_ptr<const psdo::SymbolGrid2D> grid, double guard = 1.0 / 3.0);

}  // namespace pevo::solver

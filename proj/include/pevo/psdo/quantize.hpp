#pragma once

#include <Eigen/Dense>

#include "pevo/psdo/field.hpp"
#include "pevo/symbols/symbol.hpp"

namespace pevo::psdo {

struct QuantizeOptions {
  bool check_aliasing = true;
  double alias_band = 0.1;    // top fraction of the frequency range
  double alias_tol = 1e-10;   // allowed mass there, relative to ||u||
};

// Mass of u_hat in |xi| >= (1 - band) xi_max relative to ||u||; throws AliasingError above tol.
void check_aliasing(const FieldState& u, const QuantizeOptions& opts = {});

// Kohn-Nirenberg quantization on the grid:
//   (op(p) u)(x_j) = (dxi/2pi) sum_m exp(i x_j xi_m) p(x_j, xi_m) u_hat(xi_m).
// x-independent symbols act as Fourier multipliers, xi-independent ones pointwise;
// general symbols are summed directly over their declared support.
FieldState quantize_apply(const symbols::Symbol& p, const FieldState& u, const QuantizeOptions& opts = {});

// N x N matrix of op(p) acting on nodal values (oracle for N <= 512).
Eigen::MatrixXcd dense_matrix(const symbols::Symbol& p, const SymbolGrid2D& grid);

}  // namespace pevo::psdo

#pragma once

#include <vector>

#include "pevo/psdo/field.hpp"
#include "pevo/psdo/quantize.hpp"
#include "pevo/symbols/symbol.hpp"

namespace pevo::psdo {

// sum_{alpha <= nu-1} (1/alpha!) d_xi^alpha p1 * D_x^alpha p2, D_x = -i d_x
symbols::Symbol compose_expansion(const symbols::Symbol& p1, const symbols::Symbol& p2, int nu);

// max over probes of ||op(p1) op(p2) u - op(compose_expansion(p1, p2, nu)) u|| / ||u||
double composition_remainder_norm(const symbols::Symbol& p1, const symbols::Symbol& p2, int nu,
                                  const std::vector<FieldState>& probes, const QuantizeOptions& opts = {});

// max over probes of ||op(p1) op(p2) u|| / ||u||
double product_norm(const symbols::Symbol& p1, const symbols::Symbol& p2, const std::vector<FieldState>& probes,
                    const QuantizeOptions& opts = {});

}  // namespace pevo::psdo

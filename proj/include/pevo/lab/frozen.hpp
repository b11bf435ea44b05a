#pragma once

#include <array>

// Regression constants measured once and asserted thereafter within kFrozenSlack.
namespace pevo::lab::frozen {

inline constexpr double kFrozenSlack = 0.05;

// calibrate_cv(): max ||op(p) u|| / (|p|_{2,2} ||u||) on the pinned 30-probe corpus
inline constexpr double C_cv = 0.2190592796;

// calibrate_theorem_b(): max |p_theta|_{l,l} / (|p1|_{l+2,l+2} |p2|_{l+2,l+2}), l = 0, 1, 2
inline constexpr std::array<double, 3> C_ell = {1.000053642, 1.000053642, 1.000053642};

// measure_noise_floor_As on the zero family with the default plan (rho = 4, 8, 16 at a_eff = 2.2)
inline constexpr double A_s = 6.64504902;

// measure_c1 with the default plan
inline constexpr double c1 = 1.40565043;

}  // namespace pevo::lab::frozen

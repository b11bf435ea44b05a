#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pevo/psdo/harness.hpp"

namespace pevo::lab {

// Pinned regression corpus for constants whose existence is guaranteed but whose values are not.
inline constexpr std::uint64_t kCorpusSeed = 2024;
inline constexpr int kCorpusProbes = 30;

struct CvCase {
  std::string name;
  psdo::CvReport report;
};

struct CvCalibration {
  std::vector<CvCase> cases;
  double C_cv = 0.0;  // max ratio ||op(p) u|| / (|p|_{2,2} ||u||) over cases and probes
};

// Symbols: a scaled localizer w(0) at rho = 4, e^{ix} times a frequency bump, a trig coefficient
// times a Gaussian multiplier. 30 probes from `seed` on a 1024-node grid over [-20, 20); the frozen
// C_cv refers to kCorpusSeed.
CvCalibration calibrate_cv(std::uint64_t seed = kCorpusSeed);

struct TheoremBCase {
  std::string name;
  psdo::TheoremBReport report;
};

struct TheoremBCalibration {
  std::vector<TheoremBCase> cases;
  std::array<double, 3> C_ell{};  // max ratio per ell = 0, 1, 2
};

// Oscillatory products of the Gaussian multiplier against the trig coefficient (the overlapping
// pair of the composition suite), of two Gaussian-times-trig symbols, and of a narrow Gaussian
// against a fast cosine coefficient; theta in {0, 1/2, 1}, 256-node grid over [-20, 20).
TheoremBCalibration calibrate_theorem_b();

}  // namespace pevo::lab

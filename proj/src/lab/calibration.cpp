#include "pevo/lab/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "pevo/coefficients/families.hpp"
#include "pevo/symbols/localizer.hpp"

namespace pevo::lab {

namespace {

using psdo::cplx;
using symbols::Symbol;

constexpr double kPi = std::numbers::pi;
constexpr double kL = 20.0;

// exp(-(xi - c)^2 / (2 s^2)) with derivatives via Hermite polynomials
Symbol gaussian_xi(double c, double s) {
  return Symbol::of_xi([c, s](int k, double xi) -> cplx {
    const double z = (xi - c) / s;
    double h0 = 1, h1 = z;
    double hk = k == 0 ? h0 : h1;
    for (int i = 1; i < k; ++i) {
      const double h2 = z * h1 - i * h0;
      h0 = h1;
      h1 = h2;
      hk = h2;
    }
    return ((k % 2) ? -1.0 : 1.0) * hk * std::pow(s, -k) * std::exp(-0.5 * z * z);
  }, 20);
}

// 1 + 0.3 cos(3 pi x / L) + 0.2 sin(5 pi x / L): periodic and band-limited on the box
Symbol trig_coefficient() {
  const double k1 = 3 * kPi / kL, k2 = 5 * kPi / kL;
  return Symbol::of_x([=](int d, double x) -> cplx {
    const double ph = d * kPi / 2;
    return (d == 0 ? 1.0 : 0.0) + 0.3 * std::pow(k1, d) * std::cos(k1 * x + ph) +
           0.2 * std::pow(k2, d) * std::sin(k2 * x + ph);
  }, 40);
}

// 1 + 0.5 cos(k x) with k = 2 pi 13 / (2L)
Symbol fast_cos() {
  const double k = 13 * kPi / kL;
  return Symbol::of_x([k](int d, double x) -> cplx {
    return (d == 0 ? 1.0 : 0.0) + 0.5 * std::pow(k, d) * std::cos(k * x + d * kPi / 2);
  }, 40);
}

Symbol plane_wave_x() {
  return Symbol::of_x([](int d, double x) -> cplx { return std::pow(cplx(0.0, 1.0), d) * std::exp(cplx(0.0, x)); }, 40);
}

}  // namespace

CvCalibration calibrate_cv(std::uint64_t seed) {
  auto grid = psdo::SymbolGrid2D(kL, 1024).share();
  const auto probes = psdo::make_probe_corpus(grid, kCorpusProbes, seed);
  const double xm = grid->xi_max();
  CvCalibration out;
  auto run = [&](std::string name, const Symbol& p, const symbols::GridSample& smp) {
    out.cases.push_back({std::move(name), psdo::cv_bound_harness(p, probes, smp, seed)});
    out.C_cv = std::max(out.C_cv, out.cases.back().report.ratio);
  };

  {
    auto model = std::make_shared<const coefficients::CoefficientModel>(coefficients::make_family({}));
    symbols::LocalizerParams par;
    par.rho = 4;
    par.a = 2.2;
    par.mu = 1.1;
    par.regime = symbols::Regime::scaled;
    symbols::LocalizerFamily fam(model, std::make_shared<const symbols::SmoothCutoff>(), par);
    const auto xs = fam.x_support(0.0), ks = fam.xi_support();
    run("localizer_w00", fam.symbol(0, 0, 0.0), {{xs.lo, xs.hi}, {ks.lo, ks.hi}, 201, 201});
  }
  {
    const auto bump = Symbol::of_xi([](int k, double xi) -> cplx {
      const double z = (xi - 10) / 4;
      if (std::abs(z) >= 0.5) return 0.0;
      static const symbols::SmoothCutoff h;
      return h.derivative(k, z) * std::pow(0.25, k);
    }, 12, {8, 12});
    run("plane_wave_bump", Symbol::product(plane_wave_x(), bump), {{-kL, kL}, {8, 12}, 401, 201});
  }
  run("trig_gaussian", Symbol::product(trig_coefficient(), gaussian_xi(0, 2)), {{-kL, kL}, {-xm, xm}, 401, 401});
  return out;
}

TheoremBCalibration calibrate_theorem_b() {
  psdo::SymbolGrid2D grid(kL, 256);
  const double xm = grid.xi_max();
  const symbols::GridSample smp{{-kL, kL}, {-xm, xm}, 201, 401};
  // frequency columns around xi = 0 where the Gaussians live
  const std::size_t mid = grid.N() / 2;
  const std::size_t i_lo = mid - 24, i_hi = mid + 24;
  struct Pair {
    std::string name;
    Symbol p1, p2;
  };
  const std::vector<Pair> pairs = {
      {"gaussian_vs_trig", gaussian_xi(0, 2), trig_coefficient()},
      {"trig_gaussian_vs_trig_gaussian", Symbol::product(trig_coefficient(), gaussian_xi(1, 3)),
       Symbol::product(trig_coefficient(), gaussian_xi(-1, 2))},
      // derivative-dominated: narrow multiplier against a fast periodic coefficient
      {"narrow_gaussian_vs_fast_cos", gaussian_xi(0, 0.6), fast_cos()},
  };
  TheoremBCalibration out;
  for (const auto& pr : pairs)
    for (double theta : {0.0, 0.5, 1.0})
      for (int ell = 0; ell <= 2; ++ell) {
        auto r = psdo::theorem_b_check(pr.p1, pr.p2, theta, ell, grid, i_lo, i_hi, smp);
        out.C_ell[static_cast<std::size_t>(ell)] = std::max(out.C_ell[static_cast<std::size_t>(ell)], r.ratio);
        out.cases.push_back({pr.name, r});
      }
  return out;
}

}  // namespace pevo::lab

#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace pevo::psdo {

using cplx = std::complex<double>;

// Periodic box [-L, L) with N nodes x_j = -L + 2Lj/N and frequencies xi_m = pi m / L,
// m in [-N/2, N/2). Spectra are stored in natural order: index i <-> m = i - N/2.
//   forward:  u_hat(xi_m) = dx sum_j u_j exp(-i x_j xi_m)
//   inverse:  u_j = (dxi / 2pi) sum_m exp(i x_j xi_m) u_hat(xi_m)
class SymbolGrid2D {
 public:
  SymbolGrid2D(double L, std::size_t N, double target_frequency = 0.0, double oversampling = 1.0);

  // Smallest power-of-two grid on [-L, L) whose max |xi| >= oversampling * target_frequency.
  static SymbolGrid2D for_frequency(double L, double target_frequency, double oversampling = 1.0,
                                    std::size_t min_N = 64);

  double L() const { return L_; }
  std::size_t N() const { return N_; }
  double dx() const { return dx_; }
  double dxi() const { return dxi_; }
  double x(std::size_t j) const { return -L_ + dx_ * static_cast<double>(j); }
  long m(std::size_t i) const { return static_cast<long>(i) - static_cast<long>(N_ / 2); }
  double xi(std::size_t i) const { return dxi_ * static_cast<double>(m(i)); }
  double xi_max() const { return dxi_ * static_cast<double>(N_ / 2); }
  double target_frequency() const { return target_; }
  double oversampling() const { return oversampling_; }

  // exp(i x_j xi_m) for natural index i
  cplx phase(std::size_t j, std::size_t i) const;

  void forward(const cplx* in, cplx* out) const;
  void inverse(const cplx* in, cplx* out) const;
  std::vector<cplx> forward(const std::vector<cplx>& u) const;
  std::vector<cplx> inverse(const std::vector<cplx>& uhat) const;

  // mask of the retained band |xi| <= (1 - guard) xi_max
  double retained_limit(double guard) const { return (1.0 - guard) * xi_max(); }

  std::shared_ptr<const SymbolGrid2D> share() const { return std::make_shared<SymbolGrid2D>(*this); }

 private:
  double L_;
  std::size_t N_;
  double dx_, dxi_;
  double target_, oversampling_;
  std::shared_ptr<const std::vector<cplx>> twiddle_;  // exp(2 pi i r / N)
};

}  // namespace pevo::psdo

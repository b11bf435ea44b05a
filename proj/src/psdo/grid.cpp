#include "pevo/psdo/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "pevo/common/errors.hpp"

namespace pevo::psdo {

namespace {

struct Plans {
  fftw_plan fwd = nullptr, bwd = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// Plans are created once per size under a global lock and executed with the
// new-array interface, which FFTW documents as thread safe.
const Plans& plans_for(std::size_t N) {
  static std::map<std::size_t, Plans> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find(N);
  if (it != cache.end()) return it->second;
  auto* a = fftw_alloc_complex(N);
  auto* b = fftw_alloc_complex(N);
  const int n = static_cast<int>(N);
  Plans p;
  p.fwd = fftw_plan_dft_1d(n, a, b, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.bwd = fftw_plan_dft_1d(n, a, b, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(a);
  fftw_free(b);
  return cache.emplace(N, p).first->second;
}

std::shared_ptr<const std::vector<cplx>> twiddles_for(std::size_t N) {
  static std::map<std::size_t, std::weak_ptr<const std::vector<cplx>>> cache;
  static std::mutex m;
  std::lock_guard<std::mutex> lock(m);
  if (auto sp = cache[N].lock()) return sp;
  auto v = std::make_shared<std::vector<cplx>>(N);
  for (std::size_t r = 0; r < N; ++r) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(N);
    (*v)[r] = {std::cos(a), std::sin(a)};
  }
  cache[N] = v;
  return v;
}

bool power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

}  // namespace

SymbolGrid2D::SymbolGrid2D(double L, std::size_t N, double target_frequency, double oversampling)
    : L_(L), N_(N), target_(target_frequency), oversampling_(oversampling) {
  if (!(L > 0)) throw DomainError("grid half-length must be positive");
  if (!power_of_two(N)) throw DomainError("grid size must be a power of two");
  dx_ = 2.0 * L / static_cast<double>(N);
  dxi_ = std::numbers::pi / L;
  if (xi_max() < oversampling * target_frequency * (1 - 1e-12))
    throw ResolutionError("grid does not resolve the target frequency");
  twiddle_ = twiddles_for(N);
}

SymbolGrid2D SymbolGrid2D::for_frequency(double L, double target_frequency, double oversampling, std::size_t min_N) {
  std::size_t N = std::max<std::size_t>(min_N, 2);
  while (std::numbers::pi / L * static_cast<double>(N / 2) < oversampling * target_frequency) N *= 2;
  return SymbolGrid2D(L, N, target_frequency, oversampling);
}

cplx SymbolGrid2D::phase(std::size_t j, std::size_t i) const {
  // exp(i x_j xi_m) = (-1)^m exp(2 pi i j m / N)
  const long mm = m(i);
  const auto N = static_cast<long long>(N_);
  long long r = (static_cast<long long>(j) * mm) % N;
  if (r < 0) r += N;
  const cplx w = (*twiddle_)[static_cast<std::size_t>(r)];
  return (mm % 2) ? -w : w;
}

void SymbolGrid2D::forward(const cplx* in, cplx* out) const {
  std::vector<cplx> tmp(N_);
  fftw_execute_dft(plans_for(N_).fwd, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(tmp.data()));
  for (std::size_t i = 0; i < N_; ++i) {
    const long mm = m(i);
    const std::size_t k = mm >= 0 ? static_cast<std::size_t>(mm) : static_cast<std::size_t>(mm + static_cast<long>(N_));
    const double s = (mm % 2) ? -dx_ : dx_;
    out[i] = s * tmp[k];
  }
}

void SymbolGrid2D::inverse(const cplx* in, cplx* out) const {
  std::vector<cplx> tmp(N_);
  for (std::size_t i = 0; i < N_; ++i) {
    const long mm = m(i);
    const std::size_t k = mm >= 0 ? static_cast<std::size_t>(mm) : static_cast<std::size_t>(mm + static_cast<long>(N_));
    tmp[k] = (mm % 2) ? -in[i] : in[i];
  }
  std::vector<cplx> res(N_);
  fftw_execute_dft(plans_for(N_).bwd, reinterpret_cast<fftw_complex*>(tmp.data()),
                   reinterpret_cast<fftw_complex*>(res.data()));
  const double w = dxi_ / (2.0 * std::numbers::pi);
  for (std::size_t j = 0; j < N_; ++j) out[j] = w * res[j];
}

std::vector<cplx> SymbolGrid2D::forward(const std::vector<cplx>& u) const {
  if (u.size() != N_) throw DomainError("forward: size mismatch");
  std::vector<cplx> out(N_);
  forward(u.data(), out.data());
  return out;
}

std::vector<cplx> SymbolGrid2D::inverse(const std::vector<cplx>& uhat) const {
  if (uhat.size() != N_) throw DomainError("inverse: size mismatch");
  std::vector<cplx> out(N_);
  inverse(uhat.data(), out.data());
  return out;
}

}  // namespace pevo::psdo

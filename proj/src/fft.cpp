#include "fracspde/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <new>

namespace fracspde {
namespace {
// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct RealFft::Impl {
  std::size_t n = 0;
  double* re = nullptr;
  fftw_complex* sp = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  explicit Impl(std::size_t size) : n(size) {
    re = fftw_alloc_real(n);
    sp = fftw_alloc_complex(n / 2 + 1);
    if (re == nullptr || sp == nullptr) throw std::bad_alloc();
    std::lock_guard lock(planner_mutex());
    const int ni = static_cast<int>(n);
    fwd = fftw_plan_dft_r2c_1d(ni, re, sp, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(ni, sp, re, FFTW_ESTIMATE);
  }
  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (fwd != nullptr) fftw_destroy_plan(fwd);
    if (bwd != nullptr) fftw_destroy_plan(bwd);
    fftw_free(re);
    fftw_free(sp);
  }
};

RealFft::RealFft(std::size_t n) : impl_(std::make_unique<Impl>(n)) {}
RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

std::size_t RealFft::size() const { return impl_->n; }

std::span<double> RealFft::real() { return {impl_->re, impl_->n}; }

std::span<std::complex<double>> RealFft::spectrum() {
  // fftw_complex is layout-compatible with std::complex<double>.
  return {reinterpret_cast<std::complex<double>*>(impl_->sp), impl_->n / 2 + 1};
}

void RealFft::forward() { fftw_execute(impl_->fwd); }

void RealFft::backward() {
  // c2r destroys its input; callers never reuse the spectrum after this.
  fftw_execute(impl_->bwd);
  const double inv = 1.0 / static_cast<double>(impl_->n);
  for (std::size_t j = 0; j < impl_->n; ++j) impl_->re[j] *= inv;
}

}  // namespace fracspde

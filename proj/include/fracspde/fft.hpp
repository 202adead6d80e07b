#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace fracspde {

/// Real-to-complex 1-d FFT pair of fixed size with its own aligned buffers.
/// Plans are built with FFTW_ESTIMATE so the selected algorithm, and therefore
/// every output bit, does not depend on timing or on which thread built it.
/// Not copyable; one instance per thread.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const;
  std::size_t spectrum_size() const { return size() / 2 + 1; }

  std::span<double> real();
  std::span<std::complex<double>> spectrum();

  /// real() -> spectrum(), unnormalised.
  void forward();
  /// spectrum() -> real(), divided by n so that backward(forward(x)) == x.
  void backward();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fracspde

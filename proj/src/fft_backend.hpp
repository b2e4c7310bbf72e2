#pragma once

// Thin wrapper over cached FFTW plans. Plans are created once per
// (dim, N, kind) under a mutex and executed through the new-array interface,
// which FFTW documents as thread-safe. All transforms are unnormalized.

#include <complex>
#include <cstddef>

#include "fracscape/spectral_grid.hpp"

namespace fracscape::detail {

using Complex = std::complex<double>;

/// Length of the half spectrum produced by the real-to-complex transform.
inline std::size_t half_size(const GridSpec& g) {
  return g.dim() == 1 ? g.n() / 2 + 1 : g.n() * (g.n() / 2 + 1);
}

/// Flat full-spectrum position of half-spectrum position p.
inline std::size_t half_to_full(const GridSpec& g, std::size_t p) {
  if (g.dim() == 1) return p;
  const std::size_t cols = g.n() / 2 + 1;
  return (p / cols) * g.n() + p % cols;
}

class FftBackend {
 public:
  explicit FftBackend(const GridSpec& grid);

  /// out_k = sum_j in_j exp(-2 pi i k j / N), full complex.
  void forward(const Complex* in, Complex* out) const;
  /// out_j = sum_k in_k exp(+2 pi i k j / N), full complex.
  void backward(const Complex* in, Complex* out) const;
  /// Half spectrum of a real signal.
  void forward_real(const double* in, Complex* out) const;
  /// Real synthesis from a Hermitian half spectrum. `in` is overwritten.
  void backward_real(Complex* in, double* out) const;

 private:
  void* c2c_fwd_;
  void* c2c_bwd_;
  void* r2c_;
  void* c2r_;
};

}  // namespace fracscape::detail

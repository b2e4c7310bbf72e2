#pragma once

// Periodic uniform grids on the unit interval/square, real and spectral
// fields, and the discrete Fourier pair used by every operator.
//
// Spectral storage order: the coefficient of wave index k (k in
// {-N/2, ..., N/2-1}) lives at position (k mod N). In 2D the coefficient of
// (k, l) lives at row (k mod N), column (l mod N), row-major.

#include <complex>
#include <cstddef>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

namespace fracscape {

class GridSpec {
 public:
  /// Throws ContractError unless dim is 1 or 2 and n is even and >= 4.
  GridSpec(int dim, std::size_t n);

  int dim() const noexcept { return dim_; }
  std::size_t n() const noexcept { return n_; }
  double h() const noexcept { return 1.0 / static_cast<double>(n_); }
  /// h^dim, the quadrature weight of one grid point.
  double cell_volume() const noexcept { return dim_ == 1 ? h() : h() * h(); }
  /// Total number of grid points M = N^dim.
  std::size_t size() const noexcept { return dim_ == 1 ? n_ : n_ * n_; }

  /// Wave index represented by storage position p along one axis.
  int wave_index(std::size_t p) const noexcept {
    return p < n_ / 2 ? static_cast<int>(p) : static_cast<int>(p) - static_cast<int>(n_);
  }
  /// Storage position along one axis of wave index k in {-N/2, ..., N/2-1}.
  std::size_t position(int k) const noexcept {
    const auto n = static_cast<int>(n_);
    return static_cast<std::size_t>(((k % n) + n) % n);
  }

  /// Base symbol 4 pi^2 |k|^2 at flat storage position p.
  double symbol_at(std::size_t p) const noexcept;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int dim_;
  std::size_t n_;
};

/// lambda = 4 pi^2 k^2.
double multiplier(int k);
/// lambda = 4 pi^2 (k^2 + l^2).
double multiplier(int k, int l);

/// Real samples on a grid, row-major by (i, j) in 2D. Immutable.
class RealField {
 public:
  /// Throws ContractError on a length mismatch or non-finite values.
  RealField(GridSpec grid, std::vector<double> values);
  /// Zero field.
  explicit RealField(GridSpec grid);

  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }
  /// Moves the sample vector out, leaving the field empty.
  std::vector<double> release() && { return std::move(values_); }

  /// Grid points x_i = i h (and y_j = j h): fills with f(x) or f(x, y).
  template <class F>
  static RealField sample(const GridSpec& grid, F&& f);

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

class SpectralField {
 public:
  using Complex = std::complex<double>;
  SpectralField(GridSpec grid, std::vector<Complex> coeffs);

  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  /// Coefficient of wave index k (1D) / (k, l) (2D).
  Complex at(int k) const;
  Complex at(int k, int l) const;

 private:
  GridSpec grid_;
  std::vector<Complex> coeffs_;
};

/// u_hat_k = h^dim sum_i u(x_i) exp(-2 pi i k . x_i), via FFT.
SpectralField forward_transform(const RealField& u);

struct Synthesis {
  RealField field;
  /// max |Im| of the synthesized samples, discarded from `field`.
  double imag_residue;
};

/// sum_k c_k exp(2 pi i k . x_i) at every grid point; real part kept.
Synthesis inverse_transform(const SpectralField& c);

// Grid-level helpers. Inner products and norms carry the h^dim weight so that
// they approximate the continuum L2 quantities.

double inner(const RealField& a, const RealField& b);
double inner(const GridSpec& grid, std::span<const double> a, std::span<const double> b);
double l2_norm(const RealField& a);
double l2_norm(const GridSpec& grid, std::span<const double> a);
double max_abs(std::span<const double> a);

/// a*x + b*y on a shared grid.
RealField combine(double a, const RealField& x, double b, const RealField& y);
RealField scaled(double a, const RealField& x);

/// Circular shift by whole grid points: result(i) = u(i + shift) (per axis in 2D).
RealField shift(const RealField& u, long shift_x, long shift_y = 0);

template <class F>
RealField RealField::sample(const GridSpec& grid, F&& f) {
  std::vector<double> v(grid.size());
  const double h = grid.h();
  if (grid.dim() == 1) {
    for (std::size_t i = 0; i < grid.n(); ++i) {
      if constexpr (std::is_invocable_v<F, double>) {
        v[i] = f(static_cast<double>(i) * h);
      } else {
        v[i] = f(static_cast<double>(i) * h, 0.0);
      }
    }
  } else {
    for (std::size_t i = 0; i < grid.n(); ++i) {
      for (std::size_t j = 0; j < grid.n(); ++j) {
        if constexpr (std::is_invocable_v<F, double, double>) {
          v[i * grid.n() + j] = f(static_cast<double>(i) * h, static_cast<double>(j) * h);
        } else {
          v[i * grid.n() + j] = f(static_cast<double>(i) * h);
        }
      }
    }
  }
  return RealField(grid, std::move(v));
}

}  // namespace fracscape

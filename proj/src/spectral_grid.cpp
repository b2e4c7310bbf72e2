#include "fracscape/spectral_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fft_backend.hpp"
#include "fracscape/errors.hpp"

namespace fracscape {

namespace {
constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw ContractError(std::string(what) + ": fields live on different grids");
}
}  // namespace

GridSpec::GridSpec(int dim, std::size_t n) : dim_(dim), n_(n) {
  if (dim != 1 && dim != 2) throw ContractError("grid dimension must be 1 or 2, got " + std::to_string(dim));
  if (n < 4 || n % 2 != 0) throw ContractError("grid size N must be even and >= 4, got " + std::to_string(n));
}

double GridSpec::symbol_at(std::size_t p) const noexcept {
  if (dim_ == 1) return multiplier(wave_index(p));
  return multiplier(wave_index(p / n_), wave_index(p % n_));
}

double multiplier(int k) { return kFourPiSq * static_cast<double>(k) * static_cast<double>(k); }

double multiplier(int k, int l) {
  return kFourPiSq * (static_cast<double>(k) * k + static_cast<double>(l) * l);
}

RealField::RealField(GridSpec grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw ContractError("field has " + std::to_string(values_.size()) + " samples, grid expects " +
                        std::to_string(grid_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw ContractError("field sample " + std::to_string(i) + " is not finite");
  }
}

RealField::RealField(GridSpec grid) : grid_(grid), values_(grid.size(), 0.0) {}

SpectralField::SpectralField(GridSpec grid, std::vector<Complex> coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size()) {
    throw ContractError("spectrum has " + std::to_string(coeffs_.size()) + " coefficients, grid expects " +
                        std::to_string(grid_.size()));
  }
}

SpectralField::Complex SpectralField::at(int k) const {
  if (grid_.dim() != 1) throw ContractError("1D coefficient access on a 2D spectrum");
  return coeffs_[grid_.position(k)];
}

SpectralField::Complex SpectralField::at(int k, int l) const {
  if (grid_.dim() != 2) throw ContractError("2D coefficient access on a 1D spectrum");
  return coeffs_[grid_.position(k) * grid_.n() + grid_.position(l)];
}

SpectralField forward_transform(const RealField& u) {
  const GridSpec& g = u.grid();
  std::vector<detail::Complex> in(u.values().begin(), u.values().end());
  std::vector<detail::Complex> out(g.size());
  detail::FftBackend(g).forward(in.data(), out.data());
  const double w = g.cell_volume();
  for (auto& c : out) c *= w;
  return SpectralField(g, std::move(out));
}

Synthesis inverse_transform(const SpectralField& c) {
  const GridSpec& g = c.grid();
  std::vector<detail::Complex> out(g.size());
  detail::FftBackend(g).backward(c.coeffs().data(), out.data());
  std::vector<double> re(g.size());
  double residue = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    re[i] = out[i].real();
    residue = std::max(residue, std::abs(out[i].imag()));
  }
  return {RealField(g, std::move(re)), residue};
}

double inner(const GridSpec& grid, std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * grid.cell_volume();
}

double inner(const RealField& a, const RealField& b) {
  require_same_grid(a.grid(), b.grid(), "inner");
  return inner(a.grid(), a.values(), b.values());
}

double l2_norm(const GridSpec& grid, std::span<const double> a) { return std::sqrt(inner(grid, a, a)); }

double l2_norm(const RealField& a) { return l2_norm(a.grid(), a.values()); }

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

RealField combine(double a, const RealField& x, double b, const RealField& y) {
  require_same_grid(x.grid(), y.grid(), "combine");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * x[i] + b * y[i];
  return RealField(x.grid(), std::move(out));
}

RealField scaled(double a, const RealField& x) {
  std::vector<double> out(x.values().begin(), x.values().end());
  for (auto& v : out) v *= a;
  return RealField(x.grid(), std::move(out));
}

RealField shift(const RealField& u, long shift_x, long shift_y) {
  const GridSpec& g = u.grid();
  const long n = static_cast<long>(g.n());
  auto wrap = [n](long i) { return static_cast<std::size_t>(((i % n) + n) % n); };
  std::vector<double> out(g.size());
  if (g.dim() == 1) {
    for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = u[wrap(i + shift_x)];
  } else {
    for (long i = 0; i < n; ++i) {
      for (long j = 0; j < n; ++j) {
        out[static_cast<std::size_t>(i * n + j)] = u[wrap(i + shift_x) * g.n() + wrap(j + shift_y)];
      }
    }
  }
  return RealField(g, std::move(out));
}

}  // namespace fracscape

#pragma once

// Spectral fractional Laplacian (-Delta)^{alpha/2} on periodic grids.
//
// Three evaluation routes:
//  * constant order: one analysis + one synthesis, O(M log M);
//  * variable order, direct: one synthesis per grid point with the symbol
//    raised to the local order, O(M^2 log M). Used as the reference;
//  * variable order, fast: the symbol lambda^{z/2} is expanded around z = 1,
//
//      lambda^{z/2} = sum_s lambda^{1/2} (ln(lambda)/2)^s / s! (z - 1)^s,
//
//    so every term is a constant-coefficient multiplier and the result is
//    sum_s (alpha(x) - 1)^s w_s(x) with S + 1 syntheses, O(S M log M).

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "fracscape/spectral_grid.hpp"

namespace fracscape {

/// Order of the operator: a constant in (0, 2] or a field with values in (0, 2].
class OrderSpec {
 public:
  /// Throws DomainError if alpha is not in (0, 2].
  static OrderSpec constant(double alpha);
  /// Throws DomainError if any value is not in (0, 2].
  static OrderSpec variable(RealField alpha);

  bool is_constant() const noexcept { return std::holds_alternative<double>(value_); }
  /// Precondition: is_constant().
  double constant_value() const { return std::get<double>(value_); }
  /// Precondition: !is_constant().
  const RealField& field() const { return std::get<RealField>(value_); }

  double min_value() const;
  double max_value() const;
  /// Constant order, or a variable field whose values are all equal to `alpha`.
  bool is_identically(double alpha) const;

 private:
  explicit OrderSpec(std::variant<double, RealField> v) : value_(std::move(v)) {}
  std::variant<double, RealField> value_;
};

/// Precomputed expansion terms c_s(k) = lambda_k^{1/2} (ln(lambda_k)/2)^s / s!,
/// s = 0..S, stored in spectral order, with the zero mode fixed to 0.
class ExpansionPlan {
 public:
  ExpansionPlan(GridSpec grid, std::size_t order, std::vector<std::vector<double>> terms);

  const GridSpec& grid() const noexcept { return grid_; }
  /// Truncation order S.
  std::size_t order() const noexcept { return order_; }
  std::span<const double> term(std::size_t s) const { return terms_.at(s); }

 private:
  GridSpec grid_;
  std::size_t order_;
  std::vector<std::vector<double>> terms_;
};

struct MuSolution {
  int m;
  double mu;
};

/// Default truncation order for production runs.
inline constexpr std::size_t kDefaultExpansionOrder = 30;

/// result_k = lambda_k^{alpha/2} u_hat_k synthesized; zero mode maps to 0.
RealField constant_order_apply(const RealField& u, double alpha);

/// Reference evaluation: one full synthesis per grid point.
RealField variable_order_apply_direct(const RealField& u, const OrderSpec& order);
/// As above, but gives up (returns nullopt) once `deadline` has passed.
std::optional<RealField> variable_order_apply_direct(const RealField& u, const OrderSpec& order,
                                                     std::chrono::steady_clock::time_point deadline);

/// Root of mu e^{mu+1} = m + 2 by bisection on [1e-6, 20]; the returned mu
/// satisfies the inequality (upper end of the final bracket).
MuSolution solve_mu(int m);

/// Truncation order certifying |remainder| <= N^{-m} for every nonzero mode
/// and every order in (0, 2]:
///   1D: ceil(e^{mu+1} ln(pi N) - 1),  2D: ceil(e^{mu+1} ln(sqrt(2) pi N) - 1).
std::size_t select_expansion_order(int m, const GridSpec& grid);

/// Terms via the recurrence c_s = c_{s-1} (ln(lambda)/2) / s, c_0 = lambda^{1/2}.
ExpansionPlan build_expansion(const GridSpec& grid, std::size_t order);

RealField variable_order_apply_fast(const RealField& u, const OrderSpec& order, const ExpansionPlan& plan);

/// |g_k(z) - G_k(z)| for the 1D symbol of wave index k, evaluated as the
/// tail sum_{s > S} of the expansion in extended precision. No FFT involved.
double remainder_probe(int k, double z, std::size_t order);
/// Same, for an arbitrary base symbol lambda > 0 (e.g. a 2D mode).
double remainder_probe_symbol(double lambda, double z, std::size_t order);

/// Plan sidecar: "# plan <dim> <N> <S>" then one row per s, comma-separated
/// multipliers in spectral order, 17 significant digits.
void write_plan(std::ostream& os, const ExpansionPlan& plan);
ExpansionPlan read_plan(std::istream& is);
void write_plan(const std::filesystem::path& path, const ExpansionPlan& plan);
ExpansionPlan read_plan(const std::filesystem::path& path);

/// Reusable evaluator of the (possibly variable-order) operator with private
/// workspaces. Cheap to construct; not safe to share between threads.
class FractionalLaplacian {
 public:
  /// `plan` is required for variable orders (ConfigError otherwise) and is
  /// only read during construction.
  FractionalLaplacian(const GridSpec& grid, const OrderSpec& order, const ExpansionPlan* plan);

  /// out = (-Delta)^{alpha/2} in. Spans have grid.size() entries.
  void apply(std::span<const double> in, std::span<double> out);

  /// max over modes and orders of lambda^{alpha/2}: the operator's spectral radius bound.
  double stiffness() const noexcept { return stiffness_; }

 private:
  GridSpec grid_;
  OrderSpec order_;
  std::vector<std::complex<double>> spectrum_;
  std::vector<std::complex<double>> scratch_;
  std::vector<double> synth_;
  std::vector<long double> acc_;
  std::vector<double> half_symbol_;
  std::vector<std::vector<double>> half_terms_;
  double stiffness_ = 0.0;
};

}  // namespace fracscape

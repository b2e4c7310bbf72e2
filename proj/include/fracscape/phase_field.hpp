#pragma once

// Space-fractional phase-field force
//
//   F(u) = -kappa (-Delta)^{alpha/2} u + u - u^3
//
// with constant or variable order, plus the integer-order variant with a
// variable diffusion coefficient, F(u) = kappa(x) Delta u + u - u^3.

#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "fracscape/frac_operator.hpp"
#include "fracscape/spectral_grid.hpp"

namespace fracscape {

class KappaSpec {
 public:
  /// Throws DomainError unless kappa > 0.
  static KappaSpec constant(double kappa);
  /// Throws DomainError unless every value is > 0.
  static KappaSpec variable(RealField kappa);

  bool is_constant() const noexcept { return std::holds_alternative<double>(value_); }
  double constant_value() const { return std::get<double>(value_); }
  const RealField& field() const { return std::get<RealField>(value_); }
  double max_value() const;

 private:
  explicit KappaSpec(std::variant<double, RealField> v) : value_(std::move(v)) {}
  std::variant<double, RealField> value_;
};

struct DimerParams {
  /// Half-length l of the dimer along a unit direction.
  double length = 1e-4;
};

class ModelParams {
 public:
  /// Throws ConfigError if a variable kappa is combined with an order other
  /// than 2, or if fields live on a different grid.
  ModelParams(GridSpec grid, OrderSpec order, KappaSpec kappa, std::optional<ExpansionPlan> plan = std::nullopt);

  const GridSpec& grid() const noexcept { return grid_; }
  const OrderSpec& order() const noexcept { return order_; }
  const KappaSpec& kappa() const noexcept { return kappa_; }
  /// nullptr when no plan was supplied.
  const ExpansionPlan* plan() const noexcept { return plan_.get(); }

  /// Constant order and constant kappa: F is the negative gradient of an energy
  /// (for alpha = 2 it is the Ginzburg-Landau energy).
  bool is_gradient() const { return order_.is_constant() && kappa_.is_constant(); }

  /// Test hook: copy of this model with the cubic term switched off.
  ModelParams without_cubic() const;
  bool has_cubic() const noexcept { return cubic_; }

 private:
  GridSpec grid_;
  OrderSpec order_;
  KappaSpec kappa_;
  std::shared_ptr<const ExpansionPlan> plan_;
  bool cubic_ = true;
};

/// Per-thread evaluator of F and its directional derivatives.
class ForceEvaluator {
 public:
  /// Throws ConfigError when a variable order has no expansion plan.
  explicit ForceEvaluator(const ModelParams& p);

  /// out = kappa (-Delta)^{alpha/2} u, or kappa(x) (-Delta u) for variable kappa.
  void diffusion(std::span<const double> u, std::span<double> out);
  /// out = F(u).
  void force(std::span<const double> u, std::span<double> out);
  /// out = [F(u + l v) - F(u - l v)] / (2 l), using that the diffusion term
  /// is linear so one operator application suffices.
  void dimer(std::span<const double> u, std::span<const double> v, double l, std::span<double> out);

  /// Upper bound of the diffusion term's spectrum.
  double stiffness() const noexcept { return stiffness_; }
  const GridSpec& grid() const noexcept { return grid_; }

 private:
  GridSpec grid_;
  std::optional<double> kappa_;
  std::vector<double> kappa_field_;
  FractionalLaplacian laplacian_;
  bool cubic_;
  double stiffness_;
  std::vector<double> work_;
};

/// F(u) pointwise.
RealField rhs(const RealField& u, const ModelParams& p);

/// Ginzburg-Landau energy h^d sum[(kappa/2)|grad u|^2 + (1 - u^2)^2 / 4] for
/// alpha = 2 and constant kappa; the gradient term is evaluated spectrally.
/// Throws UnsupportedModelError for any other model.
double energy(const RealField& u, const ModelParams& p);

/// Central-difference Jacobian action [F(u + l v) - F(u - l v)] / (2 l).
/// Throws ContractError unless ||v|| = 1 in the weighted grid norm.
RealField jacobian_apply(const RealField& u, const RealField& v, const ModelParams& p, const DimerParams& d = {});

struct HomogeneousIndex {
  int index;
  /// Modes whose linearized eigenvalue is within 1e-12 of zero (not counted).
  int degenerate;
};

/// Number of unstable Fourier modes of the homogeneous state u = 0 or u = +-1,
/// from the linearized eigenvalues 1 - 3 u^2 - kappa lambda^{alpha/2}.
/// Throws UnsupportedModelError for variable order or kappa.
HomogeneousIndex homogeneous_index(const ModelParams& p, double state);

}  // namespace fracscape

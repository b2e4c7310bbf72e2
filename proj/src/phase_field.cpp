#include "fracscape/phase_field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracscape/errors.hpp"

namespace fracscape {

namespace {

constexpr double kDegenerateEigenvalue = 1e-12;

OrderSpec laplacian_order(const ModelParams& p) {
  // The variable-coefficient model uses the ordinary Laplacian.
  return p.kappa().is_constant() ? p.order() : OrderSpec::constant(2.0);
}

}  // namespace

// ---------------------------------------------------------------------------
// KappaSpec

KappaSpec KappaSpec::constant(double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    std::ostringstream os;
    os << "diffusion coefficient must be positive, got " << kappa;
    throw DomainError(os.str());
  }
  return KappaSpec(kappa);
}

KappaSpec KappaSpec::variable(RealField kappa) {
  for (double k : kappa.values()) {
    if (!(k > 0.0)) throw DomainError("diffusion coefficient field must be positive everywhere");
  }
  return KappaSpec(std::move(kappa));
}

double KappaSpec::max_value() const {
  if (is_constant()) return constant_value();
  const auto v = field().values();
  return *std::max_element(v.begin(), v.end());
}

// ---------------------------------------------------------------------------
// ModelParams

ModelParams::ModelParams(GridSpec grid, OrderSpec order, KappaSpec kappa, std::optional<ExpansionPlan> plan)
    : grid_(grid), order_(std::move(order)), kappa_(std::move(kappa)) {
  if (!order_.is_constant() && !(order_.field().grid() == grid_)) {
    throw ConfigError("order field grid does not match the model grid");
  }
  if (!kappa_.is_constant()) {
    if (!(kappa_.field().grid() == grid_)) throw ConfigError("kappa field grid does not match the model grid");
    if (!order_.is_identically(2.0)) throw ConfigError("a variable diffusion coefficient requires order 2");
  }
  if (plan) {
    if (!(plan->grid() == grid_)) throw ConfigError("expansion plan grid does not match the model grid");
    plan_ = std::make_shared<const ExpansionPlan>(std::move(*plan));
  }
}

ModelParams ModelParams::without_cubic() const {
  ModelParams copy = *this;
  copy.cubic_ = false;
  return copy;
}

// ---------------------------------------------------------------------------
// ForceEvaluator

ForceEvaluator::ForceEvaluator(const ModelParams& p)
    : grid_(p.grid()),
      laplacian_(p.grid(), laplacian_order(p), p.plan()),
      cubic_(p.has_cubic()),
      work_(p.grid().size()) {
  if (p.kappa().is_constant()) {
    kappa_ = p.kappa().constant_value();
  } else {
    const auto k = p.kappa().field().values();
    kappa_field_.assign(k.begin(), k.end());
  }
  stiffness_ = p.kappa().max_value() * laplacian_.stiffness();
}

void ForceEvaluator::diffusion(std::span<const double> u, std::span<double> out) {
  laplacian_.apply(u, out);
  if (kappa_) {
    for (double& x : out) x *= *kappa_;
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= kappa_field_[i];
  }
}

void ForceEvaluator::force(std::span<const double> u, std::span<double> out) {
  diffusion(u, out);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double ui = u[i];
    out[i] = -out[i] + ui - (cubic_ ? ui * ui * ui : 0.0);
  }
}

void ForceEvaluator::dimer(std::span<const double> u, std::span<const double> v, double l, std::span<double> out) {
  diffusion(v, out);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double ui = u[i];
    const double vi = v[i];
    // [(u + l v)^3 - (u - l v)^3] / (2 l) = 3 u^2 v + l^2 v^3
    const double cubic = cubic_ ? vi * (3.0 * ui * ui + l * l * vi * vi) : 0.0;
    out[i] = -out[i] + vi - cubic;
  }
}

// ---------------------------------------------------------------------------
// Free functions

RealField rhs(const RealField& u, const ModelParams& p) {
  if (!(u.grid() == p.grid())) throw ContractError("rhs: field grid does not match the model grid");
  ForceEvaluator eval(p);
  std::vector<double> out(u.size());
  eval.force(u.values(), out);
  return RealField(u.grid(), std::move(out));
}

double energy(const RealField& u, const ModelParams& p) {
  if (!p.order().is_identically(2.0) || !p.kappa().is_constant()) {
    throw UnsupportedModelError("energy is only defined for order 2 with a constant diffusion coefficient");
  }
  if (!(u.grid() == p.grid())) throw ContractError("energy: field grid does not match the model grid");
  const GridSpec& g = u.grid();
  const SpectralField uh = forward_transform(u);
  // h^d sum |grad u|^2 = sum_k lambda_k |u_hat_k|^2 (discrete Parseval).
  double gradient = 0.0;
  for (std::size_t p2 = 0; p2 < g.size(); ++p2) gradient += g.symbol_at(p2) * std::norm(uh.coeffs()[p2]);
  double potential = 0.0;
  for (double x : u.values()) potential += 0.25 * (1.0 - x * x) * (1.0 - x * x);
  return 0.5 * p.kappa().constant_value() * gradient + g.cell_volume() * potential;
}

RealField jacobian_apply(const RealField& u, const RealField& v, const ModelParams& p, const DimerParams& d) {
  if (!(u.grid() == v.grid()) || !(u.grid() == p.grid())) throw ContractError("jacobian_apply: grid mismatch");
  const double norm = l2_norm(v);
  if (norm == 0.0) throw ContractError("jacobian_apply: direction is zero");
  if (std::abs(norm - 1.0) > 1e-8) throw ContractError("jacobian_apply: direction is not unit length");
  if (!(d.length > 0.0)) throw ContractError("jacobian_apply: dimer length must be positive");
  const double l = d.length;
  const RealField plus = rhs(combine(1.0, u, l, v), p);
  const RealField minus = rhs(combine(1.0, u, -l, v), p);
  return combine(0.5 / l, plus, -0.5 / l, minus);
}

HomogeneousIndex homogeneous_index(const ModelParams& p, double state) {
  if (!p.order().is_constant() || !p.kappa().is_constant()) {
    throw UnsupportedModelError("homogeneous_index needs constant order and kappa; use compute_index");
  }
  if (state != 0.0 && state != 1.0 && state != -1.0) throw ContractError("homogeneous state must be 0, 1 or -1");
  const double alpha = p.order().constant_value();
  const double kappa = p.kappa().constant_value();
  const double shift = 1.0 - 3.0 * state * state;
  const GridSpec& g = p.grid();
  HomogeneousIndex out{0, 0};
  for (std::size_t q = 0; q < g.size(); ++q) {
    const double lambda = g.symbol_at(q);
    const double mu = shift - (lambda == 0.0 ? 0.0 : kappa * std::pow(lambda, 0.5 * alpha));
    if (std::abs(mu) <= kDegenerateEigenvalue) {
      ++out.degenerate;
    } else if (mu > 0.0) {
      ++out.index;
    }
  }
  return out;
}

}  // namespace fracscape

#include "fracscape/frac_operator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <string>

#include "fft_backend.hpp"
#include "fracscape/errors.hpp"

namespace fracscape {

namespace {

void check_order_value(double a) {
  if (!(a > 0.0 && a <= 2.0)) {
    std::ostringstream os;
    os << "fractional order " << a << " outside (0, 2]";
    throw DomainError(os.str());
  }
}

RealField as_field(const GridSpec& grid, const OrderSpec& order) {
  if (!order.is_constant()) return order.field();
  return RealField(grid, std::vector<double>(grid.size(), order.constant_value()));
}

void require_order_grid(const RealField& u, const OrderSpec& order) {
  if (!order.is_constant() && !(order.field().grid() == u.grid())) {
    throw ContractError("order field and input field live on different grids");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// OrderSpec

OrderSpec OrderSpec::constant(double alpha) {
  check_order_value(alpha);
  return OrderSpec(alpha);
}

OrderSpec OrderSpec::variable(RealField alpha) {
  for (double a : alpha.values()) check_order_value(a);
  return OrderSpec(std::move(alpha));
}

double OrderSpec::min_value() const {
  if (is_constant()) return constant_value();
  const auto v = field().values();
  return *std::min_element(v.begin(), v.end());
}

double OrderSpec::max_value() const {
  if (is_constant()) return constant_value();
  const auto v = field().values();
  return *std::max_element(v.begin(), v.end());
}

bool OrderSpec::is_identically(double alpha) const { return min_value() == alpha && max_value() == alpha; }

// ---------------------------------------------------------------------------
// Expansion plan

ExpansionPlan::ExpansionPlan(GridSpec grid, std::size_t order, std::vector<std::vector<double>> terms)
    : grid_(grid), order_(order), terms_(std::move(terms)) {
  if (terms_.size() != order_ + 1) throw ContractError("expansion plan needs S + 1 term arrays");
  for (const auto& t : terms_) {
    if (t.size() != grid_.size()) throw ContractError("expansion term length does not match grid");
    if (t[0] != 0.0) throw ContractError("expansion terms must vanish on the zero mode");
  }
}

ExpansionPlan build_expansion(const GridSpec& grid, std::size_t order) {
  std::vector<std::vector<double>> terms(order + 1, std::vector<double>(grid.size(), 0.0));
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double lambda = grid.symbol_at(p);
    if (lambda == 0.0) continue;
    const double half_log = 0.5 * std::log(lambda);
    double c = std::sqrt(lambda);
    terms[0][p] = c;
    for (std::size_t s = 1; s <= order; ++s) {
      c *= half_log / static_cast<double>(s);
      terms[s][p] = c;
    }
  }
  return ExpansionPlan(grid, order, std::move(terms));
}

MuSolution solve_mu(int m) {
  if (m < 1) throw DomainError("decay exponent m must be >= 1");
  const double target = m + 2.0;
  auto f = [target](double mu) { return mu * std::exp(mu + 1.0) - target; };
  double lo = 1e-6;
  double hi = 20.0;
  while (hi - lo > 0.5e-9) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {m, hi};
}

std::size_t select_expansion_order(int m, const GridSpec& grid) {
  const double mu = solve_mu(m).mu;
  const double n = static_cast<double>(grid.n());
  const double scale = grid.dim() == 1 ? std::numbers::pi * n : std::numbers::sqrt2 * std::numbers::pi * n;
  const double s = std::ceil(std::exp(mu + 1.0) * std::log(scale) - 1.0);
  return static_cast<std::size_t>(std::max(0.0, s));
}

double remainder_probe_symbol(double lambda, double z, std::size_t order) {
  if (!(lambda > 0.0)) throw DomainError("remainder probe needs a nonzero mode");
  check_order_value(z);
  const long double x = 0.5L * std::log(static_cast<long double>(lambda)) * (static_cast<long double>(z) - 1.0L);
  long double term = std::sqrt(static_cast<long double>(lambda));
  for (std::size_t s = 1; s <= order; ++s) term *= x / static_cast<long double>(s);

  long double tail = 0.0L;
  const long double eps = std::numeric_limits<long double>::epsilon();
  for (std::size_t s = order + 1; s < order + 4000; ++s) {
    term *= x / static_cast<long double>(s);
    tail += term;
    if (term == 0.0L) break;
    if (static_cast<long double>(s) > std::fabs(x) && std::fabs(term) <= eps * std::fabs(tail)) break;
  }
  return static_cast<double>(std::fabs(tail));
}

double remainder_probe(int k, double z, std::size_t order) {
  if (k == 0) throw DomainError("remainder probe is undefined for the zero mode");
  return remainder_probe_symbol(multiplier(k), z, order);
}

// ---------------------------------------------------------------------------
// Evaluator

FractionalLaplacian::FractionalLaplacian(const GridSpec& grid, const OrderSpec& order, const ExpansionPlan* plan)
    : grid_(grid), order_(order) {
  require_order_grid(RealField(grid), order);
  const std::size_t half = detail::half_size(grid);
  spectrum_.resize(half);
  scratch_.resize(half);
  synth_.resize(grid.size());
  const double w = grid.cell_volume();
  double lambda_max = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) lambda_max = std::max(lambda_max, grid.symbol_at(p));

  if (order.is_constant()) {
    const double alpha = order.constant_value();
    half_symbol_.resize(half);
    for (std::size_t p = 0; p < half; ++p) {
      const double lambda = grid.symbol_at(detail::half_to_full(grid, p));
      half_symbol_[p] = lambda == 0.0 ? 0.0 : w * std::pow(lambda, 0.5 * alpha);
    }
    stiffness_ = std::pow(lambda_max, 0.5 * alpha);
    return;
  }

  if (plan == nullptr) throw ConfigError("variable-order operator requires an expansion plan");
  if (!(plan->grid() == grid)) throw ContractError("expansion plan was built for a different grid");
  half_terms_.assign(plan->order() + 1, std::vector<double>(half));
  for (std::size_t s = 0; s <= plan->order(); ++s) {
    const auto full = plan->term(s);
    for (std::size_t p = 0; p < half; ++p) half_terms_[s][p] = w * full[detail::half_to_full(grid, p)];
  }
  acc_.resize(grid.size());
  stiffness_ = std::pow(lambda_max, 0.5 * order.max_value());
}

void FractionalLaplacian::apply(std::span<const double> in, std::span<double> out) {
  const detail::FftBackend fft(grid_);
  fft.forward_real(in.data(), spectrum_.data());

  if (order_.is_constant()) {
    for (std::size_t p = 0; p < spectrum_.size(); ++p) spectrum_[p] *= half_symbol_[p];
    fft.backward_real(spectrum_.data(), out.data());
    return;
  }

  // Horner in (alpha - 1), highest term first.
  const auto alpha = order_.field().values();
  std::fill(acc_.begin(), acc_.end(), 0.0L);
  for (std::size_t s = half_terms_.size(); s-- > 0;) {
    const auto& term = half_terms_[s];
    for (std::size_t p = 0; p < spectrum_.size(); ++p) scratch_[p] = spectrum_[p] * term[p];
    fft.backward_real(scratch_.data(), synth_.data());
    for (std::size_t i = 0; i < acc_.size(); ++i) {
      acc_[i] = acc_[i] * (static_cast<long double>(alpha[i]) - 1.0L) + synth_[i];
    }
  }
  for (std::size_t i = 0; i < acc_.size(); ++i) out[i] = static_cast<double>(acc_[i]);
}

// ---------------------------------------------------------------------------
// Free-function entry points

RealField constant_order_apply(const RealField& u, double alpha) {
  check_order_value(alpha);
  const OrderSpec order = OrderSpec::constant(alpha);
  FractionalLaplacian op(u.grid(), order, nullptr);
  std::vector<double> out(u.size());
  op.apply(u.values(), out);
  return RealField(u.grid(), std::move(out));
}

std::optional<RealField> variable_order_apply_direct(const RealField& u, const OrderSpec& order,
                                                     std::chrono::steady_clock::time_point deadline) {
  require_order_grid(u, order);
  const GridSpec& g = u.grid();
  const detail::FftBackend fft(g);
  const std::size_t half = detail::half_size(g);

  std::vector<std::complex<double>> spectrum(half);
  fft.forward_real(u.values().data(), spectrum.data());
  const double w = g.cell_volume();
  std::vector<double> log_symbol(half, 0.0);
  for (std::size_t p = 0; p < half; ++p) {
    spectrum[p] *= w;
    const double lambda = g.symbol_at(detail::half_to_full(g, p));
    if (lambda > 0.0) log_symbol[p] = std::log(lambda);
  }

  const RealField alpha = as_field(g, order);
  std::vector<std::complex<double>> coeffs(half);
  std::vector<double> synth(g.size());
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if ((i & 63) == 0 && std::chrono::steady_clock::now() > deadline) return std::nullopt;
    const double half_alpha = 0.5 * alpha[i];
    coeffs[0] = 0.0;
    // Position 0 is the only zero mode of the half spectrum.
    for (std::size_t p = 1; p < half; ++p) coeffs[p] = spectrum[p] * std::exp(half_alpha * log_symbol[p]);
    fft.backward_real(coeffs.data(), synth.data());
    out[i] = synth[i];
  }
  return RealField(g, std::move(out));
}

RealField variable_order_apply_direct(const RealField& u, const OrderSpec& order) {
  return *variable_order_apply_direct(u, order, std::chrono::steady_clock::time_point::max());
}

RealField variable_order_apply_fast(const RealField& u, const OrderSpec& order, const ExpansionPlan& plan) {
  require_order_grid(u, order);
  if (!(plan.grid() == u.grid())) throw ContractError("expansion plan was built for a different grid");
  const OrderSpec as_variable = order.is_constant() ? OrderSpec::variable(as_field(u.grid(), order)) : order;
  FractionalLaplacian op(u.grid(), as_variable, &plan);
  std::vector<double> out(u.size());
  op.apply(u.values(), out);
  return RealField(u.grid(), std::move(out));
}

// ---------------------------------------------------------------------------
// Plan sidecar

void write_plan(std::ostream& os, const ExpansionPlan& plan) {
  os << "# plan " << plan.grid().dim() << ' ' << plan.grid().n() << ' ' << plan.order() << "\n";
  os << std::setprecision(17);
  for (std::size_t s = 0; s <= plan.order(); ++s) {
    const auto t = plan.term(s);
    for (std::size_t p = 0; p < t.size(); ++p) {
      if (p) os << ',';
      os << t[p];
    }
    os << "\n";
  }
}

ExpansionPlan read_plan(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty plan file");
  std::istringstream hs(line);
  std::string hash, tag;
  int dim = 0;
  std::size_t n = 0, order = 0;
  if (!(hs >> hash >> tag >> dim >> n >> order) || hash != "#" || tag != "plan") {
    throw IoError("missing '# plan dim N S' header");
  }
  const GridSpec grid(dim, n);
  std::vector<std::vector<double>> terms;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(grid.size());
    const char* p = line.c_str();
    while (*p) {
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p) throw IoError("malformed plan row");
      row.push_back(v);
      p = end;
      if (*p == ',') ++p;
    }
    terms.push_back(std::move(row));
  }
  try {
    return ExpansionPlan(grid, order, std::move(terms));
  } catch (const ContractError& e) {
    throw IoError(std::string("bad plan file: ") + e.what());
  }
}

void write_plan(const std::filesystem::path& path, const ExpansionPlan& plan) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_plan(os, plan);
}

ExpansionPlan read_plan(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  return read_plan(is);
}

}  // namespace fracscape

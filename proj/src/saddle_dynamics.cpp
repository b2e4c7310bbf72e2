#include "fracscape/saddle_dynamics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>

#include "fracscape/errors.hpp"

namespace fracscape {

namespace {

using Vec = std::vector<double>;

constexpr double kDependenceTol = 1e-10;
constexpr long kCheckpointStride = 1000;

double dot(const GridSpec& g, const Vec& a, const Vec& b) { return inner(g, a, b); }

void axpy(double a, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

bool all_finite(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void orthonormalize_in_place(const GridSpec& g, std::vector<Vec>& vs) {
  for (std::size_t i = 0; i < vs.size(); ++i) {
    Vec& w = vs[i];
    const double original = l2_norm(g, w);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < i; ++j) axpy(-dot(g, vs[j], w), vs[j], w);
    }
    const double norm = l2_norm(g, w);
    if (!(original > 0.0) || norm < kDependenceTol * original) {
      throw DegeneracyError("direction " + std::to_string(i) + " is numerically dependent on the preceding ones",
                            i);
    }
    for (double& x : w) x /= norm;
  }
}

std::vector<Vec> to_vecs(const std::vector<RealField>& fs) {
  std::vector<Vec> out;
  out.reserve(fs.size());
  for (const auto& f : fs) out.emplace_back(f.values().begin(), f.values().end());
  return out;
}

std::vector<RealField> to_fields(const GridSpec& g, std::vector<Vec> vs) {
  std::vector<RealField> out;
  out.reserve(vs.size());
  for (auto& v : vs) out.emplace_back(g, std::move(v));
  return out;
}

double stable_step(double requested, const ForceEvaluator& eval, bool cap) {
  if (!cap) return requested;
  return std::min(requested, 1.8 / (eval.stiffness() + 2.0));
}

struct StepInfo {
  double du_norm = 0.0;
  double direction_change = 0.0;
};

// Holds u, F(u) and the direction fields between iterations so that F is
// evaluated once per step and the dimers need one operator application each.
class Stepper {
 public:
  Stepper(const ModelParams& p, double tau, double sigma, double l, Vec u, std::vector<Vec> dirs)
      : grid_(p.grid()), eval_(p), tau_(tau), sigma_(sigma), l_(l), u_(std::move(u)), dirs_(std::move(dirs)),
        force_(u_.size()), next_u_(u_.size()), next_force_(u_.size()), dimer_(u_.size()) {
    eval_.force(u_, force_);
    if (!all_finite(force_)) throw DivergenceError("force is not finite at the initial state");
    rayleigh_.assign(dirs_.size(), 0.0);
  }

  StepInfo advance() {
    StepInfo info;
    // u^{m+1} = u^m + tau (I - 2 V V^T) F(u^m)
    Vec reflected = force_;
    for (const Vec& v : dirs_) axpy(-2.0 * dot(grid_, v, force_), v, reflected);
    for (std::size_t i = 0; i < u_.size(); ++i) next_u_[i] = u_[i] + tau_ * reflected[i];
    info.du_norm = tau_ * l2_norm(grid_, reflected);
    if (!all_finite(next_u_)) throw DivergenceError("state became non-finite");
    eval_.force(next_u_, next_force_);
    if (!all_finite(next_force_)) throw DivergenceError("force became non-finite");

    // v~_i = v_i + sigma * dimer(u^{m+1}, v_i), then orth.
    std::vector<Vec> next_dirs = dirs_;
    for (std::size_t i = 0; i < dirs_.size(); ++i) {
      eval_.dimer(next_u_, dirs_[i], l_, dimer_);
      rayleigh_[i] = dot(grid_, dirs_[i], dimer_);
      axpy(sigma_, dimer_, next_dirs[i]);
    }
    orthonormalize_in_place(grid_, next_dirs);
    for (std::size_t i = 0; i < dirs_.size(); ++i) {
      Vec diff = next_dirs[i];
      axpy(-1.0, dirs_[i], diff);
      info.direction_change = std::max(info.direction_change, l2_norm(grid_, diff));
    }

    std::swap(u_, next_u_);
    std::swap(force_, next_force_);
    dirs_ = std::move(next_dirs);
    return info;
  }

  double residual() const { return l2_norm(grid_, force_); }
  double state_norm() const { return l2_norm(grid_, u_); }
  const Vec& u() const { return u_; }
  const std::vector<Vec>& dirs() const { return dirs_; }
  const Vec& rayleigh() const { return rayleigh_; }
  double tau() const { return tau_; }

  void reset(Vec u, std::vector<Vec> dirs, double tau, double sigma) {
    u_ = std::move(u);
    dirs_ = std::move(dirs);
    tau_ = tau;
    sigma_ = sigma;
    eval_.force(u_, force_);
  }

 private:
  GridSpec grid_;
  ForceEvaluator eval_;
  double tau_;
  double sigma_;
  double l_;
  Vec u_;
  std::vector<Vec> dirs_;
  Vec force_;
  Vec next_u_;
  Vec next_force_;
  Vec dimer_;
  Vec rayleigh_;
};

void require_orthonormal(const GridSpec& g, const std::vector<Vec>& vs) {
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double expect = i == j ? 1.0 : 0.0;
      if (std::abs(dot(g, vs[i], vs[j]) - expect) > 1e-6) {
        throw ContractError("initial directions are not orthonormal");
      }
    }
  }
}

void check_state(const SaddleState& s, const ModelParams& p, const SaddleConfig& c) {
  c.validate();
  if (!(s.u.grid() == p.grid())) throw ContractError("state grid does not match the model grid");
  if (static_cast<int>(s.directions.size()) != c.k) {
    throw ContractError("state carries " + std::to_string(s.directions.size()) + " directions, config expects " +
                        std::to_string(c.k));
  }
  for (const auto& v : s.directions) {
    if (!(v.grid() == p.grid())) throw ContractError("direction grid does not match the model grid");
  }
}

Eigen::MatrixXd dense_jacobian(const RealField& u, const ModelParams& p, const DimerParams& d) {
  const GridSpec& g = p.grid();
  if (!(u.grid() == g)) throw ContractError("compute_index: field grid does not match the model grid");
  const std::size_t m = g.size();
  if (m > kDenseIndexCap) {
    throw CapacityError("dense Jacobian needs M <= " + std::to_string(kDenseIndexCap) + " points, got " +
                        std::to_string(m) + "; certify the index on a smaller grid");
  }
  if (!(d.length > 0.0)) throw ContractError("dimer length must be positive");
  ForceEvaluator eval(p);
  Eigen::MatrixXd jac(m, m);
  Vec plus(u.values().begin(), u.values().end());
  Vec minus = plus;
  Vec f_plus(m), f_minus(m);
  // Column j: [F(u + l e_j) - F(u - l e_j)] / (2 l), i.e. the dimer along the
  // unit basis direction e_j / sqrt(h^d) with half-length l sqrt(h^d).
  for (std::size_t j = 0; j < m; ++j) {
    plus[j] = u[j] + d.length;
    minus[j] = u[j] - d.length;
    eval.force(plus, f_plus);
    eval.force(minus, f_minus);
    for (std::size_t i = 0; i < m; ++i) jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
        (f_plus[i] - f_minus[i]) / (2.0 * d.length);
    plus[j] = u[j];
    minus[j] = u[j];
  }
  return jac;
}

}  // namespace

void SaddleConfig::validate() const {
  if (!(tau > 0.0) || !(sigma > 0.0)) throw ConfigError("step sizes tau and sigma must be positive");
  if (!(resid_tol > 0.0) || !(direction_tol > 0.0)) throw ConfigError("tolerances must be positive");
  if (!(dimer.length > 0.0)) throw ConfigError("dimer length must be positive");
  if (k < 0 || k > max_index) {
    throw ConfigError("target index " + std::to_string(k) + " outside [0, " + std::to_string(max_index) + "]");
  }
  if (max_iters < 0) throw ConfigError("max_iters must be non-negative");
}

std::vector<RealField> orthonormalize(const std::vector<RealField>& vectors) {
  if (vectors.empty()) return {};
  const GridSpec g = vectors.front().grid();
  for (const auto& v : vectors) {
    if (!(v.grid() == g)) throw ContractError("orthonormalize: vectors live on different grids");
  }
  auto vs = to_vecs(vectors);
  orthonormalize_in_place(g, vs);
  return to_fields(g, std::move(vs));
}

SaddleState step(const SaddleState& s, const ModelParams& p, const SaddleConfig& c) {
  check_state(s, p, c);
  Stepper stepper(p, c.tau, c.sigma, c.dimer.length, Vec(s.u.values().begin(), s.u.values().end()),
                  to_vecs(s.directions));
  stepper.advance();
  return SaddleState{RealField(p.grid(), stepper.u()), to_fields(p.grid(), stepper.dirs()), s.iter + 1,
                     stepper.residual()};
}

std::pair<SaddleState, ConvergenceReport> run(SaddleState s0, const ModelParams& p, const SaddleConfig& c,
                                              const TrajectoryLog& log) {
  check_state(s0, p, c);
  const GridSpec& g = p.grid();
  auto dirs = to_vecs(s0.directions);
  require_orthonormal(g, dirs);
  orthonormalize_in_place(g, dirs);

  double tau = c.tau;
  double sigma = c.sigma;
  {
    const ForceEvaluator probe(p);
    tau = stable_step(tau, probe, c.stiffness_cap);
    sigma = stable_step(sigma, probe, c.stiffness_cap);
  }

  ConvergenceReport report;
  Vec u(s0.u.values().begin(), s0.u.values().end());
  std::optional<Stepper> stepper;
  try {
    stepper.emplace(p, tau, sigma, c.dimer.length, u, dirs);
  } catch (const DivergenceError&) {
    report.status = "diverged";
    report.iters = s0.iter;
    report.final_residual = std::numeric_limits<double>::infinity();
    return {std::move(s0), report};
  }

  if (log.out) {
    *log.out << "iter,residual,du_norm";
    for (int i = 0; i < c.k; ++i) *log.out << ",rayleigh_" << (i + 1);
    *log.out << "\n";
  }

  long iter = s0.iter;
  long local = 0;
  int halvings = 0;
  Vec checkpoint_u = u;
  auto checkpoint_dirs = dirs;
  long checkpoint_iter = iter;
  StepInfo last;

  bool converged = c.k == 0 && stepper->residual() <= c.resid_tol;
  bool diverged = false;
  while (!converged && local < c.max_iters) {
    bool blew_up = false;
    try {
      last = stepper->advance();
      blew_up = stepper->state_norm() > c.divergence_norm;
    } catch (const DivergenceError&) {
      blew_up = true;
    }
    if (blew_up) {
      if (halvings >= c.max_step_halvings) {
        diverged = true;
        break;
      }
      ++halvings;
      tau *= 0.5;
      sigma *= 0.5;
      stepper->reset(checkpoint_u, checkpoint_dirs, tau, sigma);
      iter = checkpoint_iter;
      continue;
    }
    ++iter;
    ++local;
    const double residual = stepper->residual();
    if (log.out && log.stride > 0 && iter % log.stride == 0) {
      *log.out << iter << ',' << residual << ',' << last.du_norm;
      for (double r : stepper->rayleigh()) *log.out << ',' << r;
      *log.out << "\n";
    }
    converged = residual <= c.resid_tol && last.direction_change <= c.direction_tol;
    if (local % kCheckpointStride == 0) {
      checkpoint_u = stepper->u();
      checkpoint_dirs = stepper->dirs();
      checkpoint_iter = iter;
    }
  }

  report.converged = converged;
  report.iters = iter;
  report.direction_change = last.direction_change;
  report.tau_used = stepper->tau();
  report.status = converged ? "converged" : (diverged ? "diverged" : "max_iters");
  report.final_residual = stepper->residual();
  SaddleState out{RealField(g, stepper->u()), to_fields(g, stepper->dirs()), iter, report.final_residual};
  return {std::move(out), report};
}

std::pair<std::vector<RealField>, bool> relax_directions(const RealField& u, std::vector<RealField> initial,
                                                         const ModelParams& p, const SaddleConfig& c,
                                                         long max_iters) {
  const GridSpec& g = p.grid();
  if (!(u.grid() == g)) throw ContractError("relax_directions: grid mismatch");
  auto dirs = to_vecs(initial);
  orthonormalize_in_place(g, dirs);
  ForceEvaluator eval(p);
  const double sigma = stable_step(c.sigma, eval, c.stiffness_cap);
  const Vec base(u.values().begin(), u.values().end());
  Vec dimer(g.size());
  bool settled = dirs.empty();
  for (long it = 0; it < max_iters && !settled; ++it) {
    auto next = dirs;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      eval.dimer(base, dirs[i], c.dimer.length, dimer);
      axpy(sigma, dimer, next[i]);
    }
    orthonormalize_in_place(g, next);
    double change = 0.0;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      Vec diff = next[i];
      axpy(-1.0, dirs[i], diff);
      change = std::max(change, l2_norm(g, diff));
    }
    dirs = std::move(next);
    settled = change <= c.direction_tol;
  }
  return {to_fields(g, std::move(dirs)), settled};
}

std::vector<RealField> softest_modes(const GridSpec& grid, std::size_t count) {
  if (count > grid.size()) throw ContractError("more modes requested than grid points");
  struct Wave {
    int k;
    int l;
    double lambda;
  };
  const int n = static_cast<int>(grid.n());
  auto wrap = [&grid](int k) { return grid.wave_index(grid.position(k)); };
  std::vector<Wave> waves;
  for (int k = -n / 2; k < n / 2; ++k) {
    for (int l = (grid.dim() == 1 ? 0 : -n / 2); l < (grid.dim() == 1 ? 1 : n / 2); ++l) {
      // One representative per conjugate pair {(k,l), (-k,-l)}.
      const int pk = wrap(-k);
      const int pl = grid.dim() == 1 ? 0 : wrap(-l);
      if (std::make_pair(pk, pl) < std::make_pair(k, l)) continue;
      waves.push_back({k, l, grid.dim() == 1 ? multiplier(k) : multiplier(k, l)});
    }
  }
  std::stable_sort(waves.begin(), waves.end(), [](const Wave& a, const Wave& b) {
    if (a.lambda != b.lambda) return a.lambda < b.lambda;
    if (std::abs(a.k) != std::abs(b.k)) return std::abs(a.k) > std::abs(b.k);
    return std::make_pair(a.k, a.l) > std::make_pair(b.k, b.l);
  });

  std::vector<RealField> out;
  const double two_pi = 2.0 * std::numbers::pi;
  for (const Wave& w : waves) {
    for (int kind = 0; kind < 2 && out.size() < count; ++kind) {
      auto mode = RealField::sample(grid, [&](double x, double y) {
        const double phase = two_pi * (w.k * x + w.l * y);
        return kind == 0 ? std::cos(phase) : std::sin(phase);
      });
      const double norm = l2_norm(mode);
      if (norm < 1e-8) continue;  // sine of a self-conjugate wave vanishes on the grid
      out.push_back(scaled(1.0 / norm, mode));
    }
    if (out.size() == count) break;
  }
  return out;
}

std::vector<double> assemble_jacobian(const RealField& u, const ModelParams& p, const DimerParams& d) {
  const Eigen::MatrixXd jac = dense_jacobian(u, p, d);
  std::vector<double> out(static_cast<std::size_t>(jac.size()));
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(out.data(), jac.rows(),
                                                                                   jac.cols()) = jac;
  return out;
}

IndexResult compute_index(const RealField& u, const ModelParams& p, const DimerParams& d) {
  Eigen::MatrixXd jac = dense_jacobian(u, p, d);
  std::vector<double> eig;
  eig.reserve(static_cast<std::size_t>(jac.rows()));
  if (p.is_gradient()) {
    const Eigen::MatrixXd sym = 0.5 * (jac + jac.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) eig.push_back(solver.eigenvalues()(i));
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(jac, false);
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) eig.push_back(solver.eigenvalues()(i).real());
  }
  std::sort(eig.begin(), eig.end(), std::greater<>());
  IndexResult result;
  for (double e : eig) {
    if (std::abs(e) <= kIndexZeroTol) {
      ++result.degenerate;
    } else if (e > 0.0) {
      ++result.index;
    }
  }
  result.eigenvalues = std::move(eig);
  return result;
}

}  // namespace fracscape

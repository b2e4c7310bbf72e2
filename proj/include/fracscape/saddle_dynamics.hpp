#pragma once

// Discrete high-index saddle dynamics:
//
//   u^{m+1}   = u^m + tau (I - 2 sum_j v_j v_j^T) F(u^m)
//   v~_i      = v_i + sigma [F(u^{m+1} + l v_i) - F(u^{m+1} - l v_i)] / (2 l)
//   [v_1..v_k] = orth[v~_1..v~_k]
//
// The same iteration serves gradient and non-gradient models. Inner products
// carry the h^dim weight.

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "fracscape/phase_field.hpp"
#include "fracscape/spectral_grid.hpp"

namespace fracscape {

struct SaddleConfig {
  /// Target index (number of direction fields).
  int k = 0;
  double tau = 1e-3;
  double sigma = 1e-3;
  DimerParams dimer{};
  long max_iters = 1'000'000;
  double resid_tol = 1e-8;
  double direction_tol = 1e-8;
  int max_index = 20;
  /// Cap tau and sigma at 1.8 / (stiffness + 2) so explicit Euler stays stable
  /// on the stiffest retained mode.
  bool stiffness_cap = true;
  /// ||u|| above which a trajectory counts as diverged.
  double divergence_norm = 1e3;
  /// How often the divergence monitor may halve tau before giving up.
  int max_step_halvings = 8;

  /// Throws ConfigError on non-positive steps/tolerances or k outside [0, max_index].
  void validate() const;
};

struct SaddleState {
  RealField u;
  std::vector<RealField> directions;
  long iter = 0;
  /// ||F(u)|| in the weighted L2 norm.
  double residual = 0.0;
};

struct ConvergenceReport {
  bool converged = false;
  double final_residual = 0.0;
  long iters = 0;
  std::optional<int> index;
  std::optional<std::vector<double>> eigenvalues;
  /// Largest per-step change of any direction field in the last step.
  double direction_change = 0.0;
  /// Step size in effect at the end (after any halvings).
  double tau_used = 0.0;
  /// "converged", "max_iters" or "diverged".
  std::string status;
};

/// Optional CSV trajectory log: iter,residual,du_norm,rayleigh_1..rayleigh_k.
struct TrajectoryLog {
  std::ostream* out = nullptr;
  long stride = 100;
};

/// Modified Gram-Schmidt with one re-orthogonalization pass.
/// Throws DegeneracyError (naming the column) when a post-projection norm
/// falls below 1e-10.
std::vector<RealField> orthonormalize(const std::vector<RealField>& vectors);

/// One iteration of the discrete saddle dynamics.
/// Throws DivergenceError if the new state is not finite.
SaddleState step(const SaddleState& s, const ModelParams& p, const SaddleConfig& c);

/// Iterates `step` until ||F(u)|| <= resid_tol and every direction moved by at
/// most direction_tol in the last step, or until max_iters / divergence.
/// Non-convergence is reported, not thrown. Deterministic.
std::pair<SaddleState, ConvergenceReport> run(SaddleState s0, const ModelParams& p, const SaddleConfig& c,
                                              const TrajectoryLog& log = {});

/// Relaxes only the direction dynamics at a fixed state u (used to obtain
/// unstable directions of a known stationary point). Returns the directions
/// and whether they settled within `max_iters`.
std::pair<std::vector<RealField>, bool> relax_directions(const RealField& u, std::vector<RealField> initial,
                                                         const ModelParams& p, const SaddleConfig& c,
                                                         long max_iters);

/// Unit-norm real Fourier modes ordered by increasing symbol: the constant,
/// then cos/sin pairs of the lowest wave vectors. `count` <= grid size.
std::vector<RealField> softest_modes(const GridSpec& grid, std::size_t count);

/// Per-grid-point displacement of the column dimers used to assemble the
/// dense Jacobian. The dimer bias on the diagonal is of order length^2.
inline constexpr double kIndexDimerLength = 1e-5;
/// Eigenvalues with |Re| <= this are reported as degenerate, not unstable.
inline constexpr double kIndexZeroTol = 1e-8;
/// Largest grid (points) for which the dense Jacobian is assembled.
inline constexpr std::size_t kDenseIndexCap = 4096;

struct IndexResult {
  int index = 0;
  /// Eigenvalues with |Re| <= kIndexZeroTol.
  int degenerate = 0;
  /// Real parts, sorted descending.
  std::vector<double> eigenvalues;
};

/// Dense Jacobian from one dimer per grid basis vector, then a dense
/// eigensolve. The index counts eigenvalues with real part > kIndexZeroTol.
/// For gradient models the symmetric part is diagonalized.
/// Throws CapacityError above kDenseIndexCap points.
IndexResult compute_index(const RealField& u, const ModelParams& p,
                          const DimerParams& d = DimerParams{kIndexDimerLength});

/// Dense Jacobian matrix (row-major, M x M) as assembled by compute_index.
std::vector<double> assemble_jacobian(const RealField& u, const ModelParams& p,
                                      const DimerParams& d = DimerParams{kIndexDimerLength});

}  // namespace fracscape

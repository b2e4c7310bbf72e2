#pragma once

// Solution landscapes: downward/upward searches driven by saddle dynamics,
// identification of solutions modulo the model's symmetries, and sweeps of
// the index of the homogeneous state u0 = 0 over (kappa, alpha).

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracscape/phase_field.hpp"
#include "fracscape/saddle_dynamics.hpp"
#include "fracscape/spectral_grid.hpp"

namespace fracscape {

struct Symmetries {
  bool translation = true;
  bool sign = true;
};

/// Translation and sign symmetry for constant-order, constant-kappa models;
/// none otherwise.
Symmetries default_symmetries(const ModelParams& p);

/// Quantum used when hashing signatures.
inline constexpr double kSignatureQuantum = 1e-6;

struct Signature {
  enum class Kind { constant = 0, spectral = 1, raw = 2 };
  Kind kind = Kind::raw;
  /// Constant fields: {value}. Translation-invariant: {u_hat_0, h^d sum u^3,
  /// |u_hat_k| ...} (the first two taken in absolute value when sign symmetry
  /// is on). Otherwise the raw samples.
  std::vector<double> values;
  /// 16 hex digits, FNV-1a of the kind and the quantized values.
  std::string id;
};

/// True if both signatures have the same kind and length and differ by at
/// most `tol` in every entry.
bool same_class(const Signature& a, const Signature& b, double tol);

struct Canonical {
  RealField u;
  Signature signature;
  /// The representative is sign * shift(u, shift_x, shift_y).
  long shift_x = 0;
  long shift_y = 0;
  int sign = 1;
};

/// Picks one representative per symmetry orbit: the image with the largest
/// maximum placed at the origin, ties broken by the raw values compared
/// lexicographically (largest wins). Constant fields are returned unchanged.
Canonical canonicalize(const RealField& u, const Symmetries& s);

/// Applies the canonical translation (not the sign: the Jacobian is even in u)
/// to direction fields.
std::vector<RealField> transform_directions(const std::vector<RealField>& v, const Canonical& c);

enum class SearchMode { downward, upward };
const char* to_string(SearchMode m);

struct Provenance {
  std::string parent;
  SearchMode mode = SearchMode::downward;
  int target = 0;
  /// 1-based index of the perturbed direction.
  int direction = 0;
  int sign = 1;
  double epsilon = 0.0;
};

struct LandscapeNode {
  std::string id;
  RealField u;
  int index = 0;
  int degenerate = 0;
  double residual = 0.0;
  /// Real parts, sorted descending.
  std::vector<double> eigenvalues;
  /// Unstable directions (index of them), orthonormal.
  std::vector<RealField> directions;
  Signature signature;
  std::vector<Provenance> provenance;
};

struct LandscapeEdge {
  std::string from;
  std::string to;
  SearchMode mode = SearchMode::downward;
  int target = 0;
  int direction = 0;
  int sign = 1;
  double epsilon = 0.0;
};

/// A search run that did not produce an admissible node.
struct Rejection {
  std::string parent;
  SearchMode mode = SearchMode::downward;
  int target = 0;
  int direction = 0;
  int sign = 1;
  std::string reason;
  double residual = 0.0;
};

struct LandscapeGraph {
  /// Insertion order; ids are unique.
  std::vector<LandscapeNode> nodes;
  std::vector<LandscapeEdge> edges;
  std::vector<Rejection> rejections;
  /// A budget was exhausted or some search step was abandoned.
  bool partial = false;
  std::vector<std::string> warnings;
  /// Classes whose index was evaluated but which were never admitted, so
  /// repeated hits skip the dense eigensolve.
  std::vector<std::pair<Signature, int>> screened;

  const LandscapeNode* find(const std::string& id) const;
  /// index -> number of canonical classes.
  std::map<int, int> classes_by_index() const;
  int max_index() const;
};

struct SearchPlan {
  SearchMode mode = SearchMode::downward;
  /// Downward: each < parent index. Upward: each > parent index.
  std::vector<int> targets;
  /// Absolute perturbation size along a unit direction.
  double epsilon = 0.1;
  /// Distinct children accepted per parent.
  int branch_budget = 64;
};

struct LandscapeOptions {
  Symmetries symmetries;
  double epsilon = 0.1;
  /// Downward targets applied to every parent (filtered to < parent index).
  /// Empty: all of 0..index-1.
  std::vector<int> targets;
  int branch_budget = 64;
  int node_budget = 512;
  /// Keep searching below newly found saddles.
  bool recurse = true;
  /// Max-abs tolerance between signatures of the same class.
  double dedup_tol = 1e-5;
  /// Converged runs are continued to this residual before indexing.
  double polish_tol = 1e-11;
  std::uint64_t seed = 0;
  /// Size of the seeded random kick added to each start, relative to epsilon.
  double jitter = 1e-3;
  int threads = 1;
};

/// Node for u0 = 0: analytic index and softest modes for constant order and
/// kappa, dense index plus direction relaxation otherwise.
LandscapeNode homogeneous_root(const ModelParams& p, const SaddleConfig& c, const LandscapeOptions& o);

/// Launches runs from (u +- eps v_i, v_1..v_m) for every target m and every
/// m < i <= parent index, and merges the converged results into `g` with edges
/// parent -> child. Returns the ids of the accepted children (new or existing).
/// Throws ContractError if a target is not below the parent index.
std::vector<std::string> downward_search(LandscapeGraph& g, std::string parent, const ModelParams& p,
                                         const SaddleConfig& c, const SearchPlan& plan, const LandscapeOptions& o);

/// Extends the parent's directions to m with the softest unused Fourier modes,
/// relaxes them at fixed u (capped at max_iters / 10 steps), then runs from
/// (u +- eps v_i) with m directions for parent index < i <= m. Edges point
/// from the found node to the parent. Throws ContractError unless every
/// target exceeds the parent index.
std::vector<std::string> upward_search(LandscapeGraph& g, std::string parent, const ModelParams& p,
                                       const SaddleConfig& c, const SearchPlan& plan, const LandscapeOptions& o);

/// Adds an existing stationary field as a node (canonicalized, indexed, with
/// relaxed directions). Returns its id; an already known class keeps its entry.
std::string add_stationary(LandscapeGraph& g, const RealField& u, const ModelParams& p, const SaddleConfig& c,
                           const LandscapeOptions& o);

/// u0 as the root, then downward search in order of decreasing index until no
/// new nodes appear or the node budget is spent. Deterministic.
LandscapeGraph build_landscape(const ModelParams& p, const SaddleConfig& c, const LandscapeOptions& o);

struct IndexCell {
  double kappa;
  double alpha;
  int index;
};

/// Order at which the mode group with symbol lambda turns unstable at u0:
/// alpha* = 2 ln(1/kappa) / ln(lambda).
struct JumpLocus {
  double kappa;
  /// |k|^2 of the mode group.
  long wave_norm2;
  double alpha_star;
};

struct IndexSweep {
  std::vector<IndexCell> cells;
  std::vector<JumpLocus> jumps;
};

/// Homogeneous index of u0 for every (kappa, alpha) pair (kappa outer loop),
/// plus the jump loci alpha* in [min(alphas), 2].
IndexSweep index_sweep(const GridSpec& grid, std::span<const double> alphas, std::span<const double> kappas);

struct KappaMatch {
  int target_index = 0;
  /// [lo, hi): every kappa' here gives the order-2 model the target index.
  std::optional<std::pair<double, double>> interval;
  std::optional<double> suggestion;
  /// Members of the search grid whose order-2 index matches.
  std::vector<double> grid_hits;
  std::string diagnostics;
};

/// Order-2 diffusion coefficients reproducing the u0 index of the model with
/// constant order alpha and coefficient kappa.
KappaMatch match_coefficient(const GridSpec& grid, double alpha, double kappa, std::span<const double> kappa_grid);

struct FamilyMatch {
  int target_index = 0;
  /// (a, b) pairs with index(u0; kappa(x) = a + b cos(2 pi x)) == target.
  std::vector<std::pair<double, double>> hits;
  std::optional<std::pair<double, double>> suggestion;
  std::string diagnostics;
};

/// Grid search over kappa(x) = a + b cos(2 pi x) (pairs with a <= |b| are
/// skipped) matching the dense-Jacobian index of u0 of `target`.
FamilyMatch match_coefficient(const ModelParams& target, std::span<const double> a_grid,
                              std::span<const double> b_grid);

}  // namespace fracscape

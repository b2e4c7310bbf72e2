#include "fracscape/landscape.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "fracscape/errors.hpp"

namespace fracscape {

namespace {

constexpr double kTieTol = 1e-9;

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 1469598103934665603ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Signature make_signature(Signature::Kind kind, std::vector<double> values) {
  Signature sig;
  sig.kind = kind;
  sig.values = std::move(values);
  const int k = static_cast<int>(kind);
  std::uint64_t h = fnv1a(&k, sizeof k);
  for (double v : sig.values) {
    const long long q = std::llround(v / kSignatureQuantum);
    h = fnv1a(&q, sizeof q, h);
  }
  sig.id = hex64(h);
  return sig;
}

bool is_constant_field(const RealField& u) {
  const auto [lo, hi] = std::minmax_element(u.values().begin(), u.values().end());
  return *hi - *lo <= kTieTol;
}

// -1 / 0 / +1 comparing a and b lexicographically with a tie tolerance.
int compare_values(std::span<const double> a, std::span<const double> b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i] + kTieTol) return 1;
    if (a[i] < b[i] - kTieTol) return -1;
  }
  return 0;
}

bool signature_less(const Signature& a, const Signature& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  if (a.values.size() != b.values.size()) return a.values.size() < b.values.size();
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const long long qa = std::llround(a.values[i] / kSignatureQuantum);
    const long long qb = std::llround(b.values[i] / kSignatureQuantum);
    if (qa != qb) return qa < qb;
  }
  return false;
}

template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

struct NodeIndex {
  int index = 0;
  int degenerate = 0;
  std::vector<double> eigenvalues;
};

NodeIndex evaluate_index(const RealField& u, const ModelParams& p) {
  if (p.is_gradient() && is_constant_field(u)) {
    const double s = u[0];
    for (double state : {0.0, 1.0, -1.0}) {
      if (std::abs(s - state) > kTieTol) continue;
      // Linearization at a homogeneous state is diagonal in Fourier space.
      const GridSpec& g = p.grid();
      const double alpha = p.order().constant_value();
      const double kappa = p.kappa().constant_value();
      NodeIndex out;
      for (std::size_t q = 0; q < g.size(); ++q) {
        const double lambda = g.symbol_at(q);
        out.eigenvalues.push_back(1.0 - 3.0 * state * state -
                                  (lambda == 0.0 ? 0.0 : kappa * std::pow(lambda, 0.5 * alpha)));
      }
      std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), std::greater<>());
      for (double e : out.eigenvalues) {
        if (std::abs(e) <= kIndexZeroTol) {
          ++out.degenerate;
        } else if (e > 0.0) {
          ++out.index;
        }
      }
      return out;
    }
  }
  IndexResult r = compute_index(u, p);
  return {r.index, r.degenerate, std::move(r.eigenvalues)};
}

// Appends the softest Fourier modes not spanned by `base` until `want` vectors.
std::vector<RealField> extend_with_modes(std::vector<RealField> base, std::size_t want, const GridSpec& g) {
  if (base.size() >= want) {
    base.erase(base.begin() + static_cast<long>(want), base.end());
    return base;
  }
  const std::size_t pool = std::min(g.size(), want + base.size() + 8);
  for (const RealField& mode : softest_modes(g, pool)) {
    if (base.size() == want) break;
    RealField w = mode;
    for (int pass = 0; pass < 2; ++pass) {
      for (const RealField& q : base) w = combine(1.0, w, -inner(q, w), q);
    }
    const double norm = l2_norm(w);
    if (norm < 1e-3) continue;
    base.push_back(scaled(1.0 / norm, w));
  }
  if (base.size() < want) throw CapacityError("not enough Fourier modes to extend the direction set");
  return base;
}

RealField kick(const GridSpec& g, const LandscapeOptions& o, const std::string& parent, SearchMode mode, int target,
               int direction, int sign, double size) {
  const std::uint64_t ph = fnv1a(parent);
  std::seed_seq seq{static_cast<std::uint32_t>(o.seed), static_cast<std::uint32_t>(o.seed >> 32),
                    static_cast<std::uint32_t>(ph), static_cast<std::uint32_t>(ph >> 32),
                    static_cast<std::uint32_t>(mode), static_cast<std::uint32_t>(target),
                    static_cast<std::uint32_t>(direction), static_cast<std::uint32_t>(sign + 1)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal;
  std::vector<double> v(g.size());
  for (double& x : v) x = normal(rng);
  RealField r(g, std::move(v));
  return scaled(size / l2_norm(r), r);
}

struct Job {
  SearchMode mode;
  int target;
  int direction;
  int sign;
  RealField start;
  std::vector<RealField> directions;
};

struct Outcome {
  std::optional<SaddleState> state;
  ConvergenceReport report;
  std::string error;
};

std::vector<Outcome> run_jobs(const std::vector<Job>& jobs, const ModelParams& p, const SaddleConfig& c,
                              const LandscapeOptions& o) {
  std::vector<Outcome> out(jobs.size());
  parallel_for(jobs.size(), o.threads, [&](std::size_t j) {
    SaddleConfig cj = c;
    cj.k = jobs[j].target;
    try {
      auto [s, r] = run(SaddleState{jobs[j].start, jobs[j].directions, 0, 0.0}, p, cj);
      if (r.converged && o.polish_tol < cj.resid_tol) {
        // Zero modes (translations) sit within O(residual) of the index
        // threshold, so the state is driven further before it is indexed.
        SaddleConfig cp = cj;
        cp.resid_tol = o.polish_tol;
        cp.direction_tol = std::min(cj.direction_tol, o.polish_tol);
        auto [ps, pr] = run(s, p, cp);
        if (pr.converged) {
          s = std::move(ps);
          r = std::move(pr);
        }
      }
      out[j].state = std::move(s);
      out[j].report = std::move(r);
    } catch (const std::exception& e) {
      out[j].error = e.what();
    }
  });
  return out;
}

std::vector<RealField> relaxed_directions(const RealField& u, std::vector<RealField> seed, int index,
                                          const ModelParams& p, const SaddleConfig& c, bool* settled) {
  if (index <= 0) {
    if (settled) *settled = true;
    return {};
  }
  auto dirs = extend_with_modes(std::move(seed), static_cast<std::size_t>(index), p.grid());
  SaddleConfig cr = c;
  cr.k = std::min(index, c.max_index);
  auto [v, ok] = relax_directions(u, std::move(dirs), p, cr, std::max(1L, c.max_iters / 10));
  if (settled) *settled = ok;
  return v;
}

LandscapeNode make_node(const Canonical& can, NodeIndex idx, std::vector<RealField> directions,
                        const ModelParams& p) {
  const RealField f = rhs(can.u, p);
  LandscapeNode node{can.signature.id, can.u, idx.index, idx.degenerate, l2_norm(f), std::move(idx.eigenvalues),
                     std::move(directions), can.signature, {}};
  return node;
}

std::optional<std::size_t> find_class(const LandscapeGraph& g, const Signature& sig, double tol) {
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (same_class(g.nodes[i].signature, sig, tol)) return i;
  }
  return std::nullopt;
}

void reject(LandscapeGraph& g, const std::string& parent, const Job& job, std::string reason, double residual) {
  g.rejections.push_back({parent, job.mode, job.target, job.direction, job.sign, std::move(reason), residual});
}

void note_partial(LandscapeGraph& g, const std::string& warning) {
  g.partial = true;
  if (std::find(g.warnings.begin(), g.warnings.end(), warning) == g.warnings.end()) g.warnings.push_back(warning);
}

// Serial merge point: results are canonicalized, sorted by signature and
// inserted in that order so the graph does not depend on scheduling.
std::vector<std::string> merge(LandscapeGraph& g, const std::string& parent_id, const std::vector<Job>& jobs,
                               std::vector<Outcome>& outcomes, const ModelParams& p, const SaddleConfig& c,
                               const SearchPlan& plan, const LandscapeOptions& o) {
  struct Candidate {
    std::size_t job;
    Canonical can;
  };
  std::vector<Candidate> cands;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    Outcome& oc = outcomes[j];
    if (!oc.error.empty()) {
      reject(g, parent_id, jobs[j], oc.error, std::numeric_limits<double>::quiet_NaN());
    } else if (!oc.report.converged) {
      reject(g, parent_id, jobs[j], oc.report.status, oc.report.final_residual);
    } else {
      cands.push_back({j, canonicalize(oc.state->u, o.symmetries)});
    }
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    return signature_less(a.can.signature, b.can.signature);
  });

  const int parent_index = g.find(parent_id)->index;
  auto admissible = [&](int index) {
    return plan.mode == SearchMode::downward ? index < parent_index : index > parent_index;
  };
  std::vector<std::string> accepted;
  for (const Candidate& cand : cands) {
    const Job& job = jobs[cand.job];
    const double residual = outcomes[cand.job].report.final_residual;
    std::string id;
    if (auto hit = find_class(g, cand.can.signature, o.dedup_tol)) {
      id = g.nodes[*hit].id;
      if (!admissible(g.nodes[*hit].index)) {
        reject(g, parent_id, job, "index " + std::to_string(g.nodes[*hit].index) + " not admissible", residual);
        continue;
      }
    } else {
      auto screened = std::find_if(g.screened.begin(), g.screened.end(),
                                   [&](const auto& s) { return same_class(s.first, cand.can.signature, o.dedup_tol); });
      if (screened != g.screened.end()) {
        reject(g, parent_id, job, "index " + std::to_string(screened->second) + " not admissible", residual);
        continue;
      }
      NodeIndex idx = evaluate_index(cand.can.u, p);
      if (!admissible(idx.index)) {
        g.screened.emplace_back(cand.can.signature, idx.index);
        reject(g, parent_id, job, "index " + std::to_string(idx.index) + " not admissible", residual);
        continue;
      }
      if (static_cast<int>(g.nodes.size()) >= o.node_budget) {
        note_partial(g, "node budget exhausted");
        reject(g, parent_id, job, "node budget exhausted", residual);
        continue;
      }
      auto run_dirs = transform_directions(outcomes[cand.job].state->directions, cand.can);
      std::vector<RealField> dirs;
      if (static_cast<int>(run_dirs.size()) == idx.index) {
        dirs = std::move(run_dirs);
      } else {
        bool settled = true;
        dirs = relaxed_directions(cand.can.u, std::move(run_dirs), idx.index, p, c, &settled);
        if (!settled) note_partial(g, "direction relaxation did not settle for node " + cand.can.signature.id);
      }
      g.nodes.push_back(make_node(cand.can, std::move(idx), std::move(dirs), p));
      id = g.nodes.back().id;
    }

    if (std::find(accepted.begin(), accepted.end(), id) == accepted.end()) {
      if (static_cast<int>(accepted.size()) >= plan.branch_budget) {
        note_partial(g, "branch budget exhausted at " + parent_id);
        reject(g, parent_id, job, "branch budget exhausted", residual);
        continue;
      }
      accepted.push_back(id);
    }
    const std::string from = plan.mode == SearchMode::downward ? parent_id : id;
    const std::string to = plan.mode == SearchMode::downward ? id : parent_id;
    const bool known_edge = std::any_of(g.edges.begin(), g.edges.end(),
                                        [&](const LandscapeEdge& e) { return e.from == from && e.to == to; });
    if (!known_edge) g.edges.push_back({from, to, job.mode, job.target, job.direction, job.sign, plan.epsilon});
    for (auto& node : g.nodes) {
      if (node.id == id) {
        node.provenance.push_back({parent_id, job.mode, job.target, job.direction, job.sign, plan.epsilon});
      }
    }
  }
  return accepted;
}

const LandscapeNode& require_node(const LandscapeGraph& g, const std::string& id) {
  const LandscapeNode* n = g.find(id);
  if (!n) throw ContractError("unknown landscape node " + id);
  return *n;
}

}  // namespace

// ---------------------------------------------------------------------------
// Canonical forms

Symmetries default_symmetries(const ModelParams& p) {
  return p.is_gradient() ? Symmetries{true, true} : Symmetries{false, false};
}

bool same_class(const Signature& a, const Signature& b, double tol) {
  if (a.kind != b.kind || a.values.size() != b.values.size()) return false;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (std::abs(a.values[i] - b.values[i]) > tol) return false;
  }
  return true;
}

Canonical canonicalize(const RealField& u, const Symmetries& s) {
  for (double x : u.values()) {
    if (!std::isfinite(x)) throw ContractError("canonicalize: field is not finite");
  }
  const GridSpec& g = u.grid();
  if (is_constant_field(u)) {
    return Canonical{u, make_signature(Signature::Kind::constant, {u[0]}), 0, 0, 1};
  }

  std::optional<Canonical> best;
  double best_max = 0.0;
  for (int sign : {1, -1}) {
    if (sign < 0 && !s.sign) break;
    const RealField v = sign > 0 ? u : scaled(-1.0, u);
    const double vmax = *std::max_element(v.values().begin(), v.values().end());
    std::vector<std::pair<long, long>> shifts;
    if (s.translation) {
      for (std::size_t q = 0; q < v.size(); ++q) {
        if (v[q] < vmax - kTieTol) continue;
        if (g.dim() == 1) {
          shifts.emplace_back(static_cast<long>(q), 0);
        } else {
          shifts.emplace_back(static_cast<long>(q / g.n()), static_cast<long>(q % g.n()));
        }
      }
    } else {
      shifts.emplace_back(0, 0);
    }
    for (auto [sx, sy] : shifts) {
      RealField cand = (sx == 0 && sy == 0) ? v : shift(v, sx, sy);
      bool better = !best;
      if (best) {
        if (vmax > best_max + kTieTol) {
          better = true;
        } else if (vmax >= best_max - kTieTol) {
          better = compare_values(cand.values(), best->u.values()) > 0;
        }
      }
      if (better) {
        best = Canonical{std::move(cand), {}, sx, sy, sign};
        best_max = vmax;
      }
    }
  }

  if (s.translation) {
    const SpectralField uh = forward_transform(u);
    std::vector<double> sig;
    sig.reserve(uh.size() + 1);
    double cubic = 0.0;
    for (double x : u.values()) cubic += x * x * x;
    cubic *= g.cell_volume();
    const double mean = uh.coeffs()[0].real();
    sig.push_back(s.sign ? std::abs(mean) : mean);
    sig.push_back(s.sign ? std::abs(cubic) : cubic);
    for (std::size_t q = 1; q < uh.size(); ++q) sig.push_back(std::abs(uh.coeffs()[q]));
    best->signature = make_signature(Signature::Kind::spectral, std::move(sig));
  } else {
    const auto v = best->u.values();
    best->signature = make_signature(Signature::Kind::raw, std::vector<double>(v.begin(), v.end()));
  }
  return std::move(*best);
}

std::vector<RealField> transform_directions(const std::vector<RealField>& v, const Canonical& c) {
  std::vector<RealField> out;
  out.reserve(v.size());
  for (const auto& d : v) out.push_back((c.shift_x == 0 && c.shift_y == 0) ? d : shift(d, c.shift_x, c.shift_y));
  return out;
}

const char* to_string(SearchMode m) { return m == SearchMode::downward ? "downward" : "upward"; }

// ---------------------------------------------------------------------------
// Graph

const LandscapeNode* LandscapeGraph::find(const std::string& id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

std::map<int, int> LandscapeGraph::classes_by_index() const {
  std::map<int, int> out;
  for (const auto& n : nodes) ++out[n.index];
  return out;
}

int LandscapeGraph::max_index() const {
  int m = 0;
  for (const auto& n : nodes) m = std::max(m, n.index);
  return m;
}

// ---------------------------------------------------------------------------
// Searches

LandscapeNode homogeneous_root(const ModelParams& p, const SaddleConfig& c, const LandscapeOptions& o) {
  const RealField zero(p.grid());
  Canonical can = canonicalize(zero, o.symmetries);
  NodeIndex idx = evaluate_index(zero, p);
  if (idx.index > c.max_index) {
    throw ConfigError("index of u0 is " + std::to_string(idx.index) + ", above max_index " +
                      std::to_string(c.max_index));
  }
  std::vector<RealField> dirs;
  if (p.is_gradient()) {
    // At u0 the Jacobian is diagonal in Fourier space with eigenvalues
    // decreasing in |k|, so the softest modes are the unstable directions.
    dirs = softest_modes(p.grid(), static_cast<std::size_t>(idx.index));
  } else {
    dirs = relaxed_directions(zero, {}, idx.index, p, c, nullptr);
  }
  return make_node(can, std::move(idx), std::move(dirs), p);
}

std::vector<std::string> downward_search(LandscapeGraph& g, std::string parent, const ModelParams& p,
                                         const SaddleConfig& c, const SearchPlan& plan, const LandscapeOptions& o) {
  const LandscapeNode& node = require_node(g, parent);
  if (plan.mode != SearchMode::downward) throw ContractError("downward_search needs a downward plan");
  for (int m : plan.targets) {
    if (m < 0 || m >= node.index) {
      throw ContractError("downward target " + std::to_string(m) + " is not below parent index " +
                          std::to_string(node.index));
    }
  }
  if (static_cast<int>(node.directions.size()) < node.index) {
    throw ContractError("parent " + parent + " stores fewer directions than its index");
  }
  std::vector<Job> jobs;
  for (int m : plan.targets) {
    const std::vector<RealField> dirs(node.directions.begin(), node.directions.begin() + m);
    for (int i = m + 1; i <= node.index; ++i) {
      for (int sign : {1, -1}) {
        RealField start = combine(1.0, node.u, sign * plan.epsilon, node.directions[static_cast<std::size_t>(i - 1)]);
        if (o.jitter > 0.0) {
          start = combine(1.0, start, 1.0,
                          kick(p.grid(), o, parent, SearchMode::downward, m, i, sign, o.jitter * plan.epsilon));
        }
        jobs.push_back({SearchMode::downward, m, i, sign, std::move(start), dirs});
      }
    }
  }
  auto outcomes = run_jobs(jobs, p, c, o);
  return merge(g, parent, jobs, outcomes, p, c, plan, o);
}

std::vector<std::string> upward_search(LandscapeGraph& g, std::string parent, const ModelParams& p,
                                       const SaddleConfig& c, const SearchPlan& plan, const LandscapeOptions& o) {
  const LandscapeNode& node = require_node(g, parent);
  if (plan.mode != SearchMode::upward) throw ContractError("upward_search needs an upward plan");
  for (int m : plan.targets) {
    if (m <= node.index || m > c.max_index) {
      throw ContractError("upward target " + std::to_string(m) + " must exceed parent index " +
                          std::to_string(node.index) + " and not exceed max_index");
    }
  }
  std::vector<Job> jobs;
  const RealField u = node.u;
  const std::vector<RealField> base = node.directions;
  const int parent_index = node.index;
  for (int m : plan.targets) {
    bool settled = true;
    std::vector<RealField> dirs = relaxed_directions(u, base, m, p, c, &settled);
    if (!settled) {
      Job placeholder{SearchMode::upward, m, 0, 0, u, {}};
      reject(g, parent, placeholder, "direction relaxation stagnated", 0.0);
      note_partial(g, "direction relaxation stagnated at " + parent);
      continue;
    }
    for (int i = parent_index + 1; i <= m; ++i) {
      for (int sign : {1, -1}) {
        RealField start = combine(1.0, u, sign * plan.epsilon, dirs[static_cast<std::size_t>(i - 1)]);
        if (o.jitter > 0.0) {
          start = combine(1.0, start, 1.0,
                          kick(p.grid(), o, parent, SearchMode::upward, m, i, sign, o.jitter * plan.epsilon));
        }
        jobs.push_back({SearchMode::upward, m, i, sign, std::move(start), dirs});
      }
    }
  }
  auto outcomes = run_jobs(jobs, p, c, o);
  return merge(g, parent, jobs, outcomes, p, c, plan, o);
}

std::string add_stationary(LandscapeGraph& g, const RealField& u, const ModelParams& p, const SaddleConfig& c,
                           const LandscapeOptions& o) {
  Canonical can = canonicalize(u, o.symmetries);
  if (auto hit = find_class(g, can.signature, o.dedup_tol)) return g.nodes[*hit].id;
  NodeIndex idx = evaluate_index(can.u, p);
  const int index = idx.index;
  auto dirs = relaxed_directions(can.u, {}, index, p, c, nullptr);
  g.nodes.push_back(make_node(can, std::move(idx), std::move(dirs), p));
  return g.nodes.back().id;
}

LandscapeGraph build_landscape(const ModelParams& p, const SaddleConfig& c, const LandscapeOptions& o) {
  LandscapeGraph g;
  g.nodes.push_back(homogeneous_root(p, c, o));
  const std::string root = g.nodes.front().id;
  std::set<std::string> expanded;
  while (true) {
    // Next parent: highest index first, insertion order among equals.
    const LandscapeNode* next = nullptr;
    for (const auto& n : g.nodes) {
      if (n.index == 0 || expanded.count(n.id)) continue;
      if (!next || n.index > next->index) next = &n;
    }
    if (!next) break;
    const std::string id = next->id;
    const int index = next->index;
    expanded.insert(id);
    if (!o.recurse && id != root) continue;

    SearchPlan plan{SearchMode::downward, {}, o.epsilon, o.branch_budget};
    if (o.targets.empty()) {
      for (int m = 0; m < index; ++m) plan.targets.push_back(m);
    } else {
      for (int m : o.targets) {
        if (m >= 0 && m < index) plan.targets.push_back(m);
      }
    }
    if (plan.targets.empty()) continue;
    downward_search(g, id, p, c, plan, o);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Index sweeps and coefficient matching

namespace {

// Distinct |k|^2 > 0 over the grid's wave vectors with their multiplicities.
std::map<long, int> wave_groups(const GridSpec& g) {
  std::map<long, int> out;
  for (std::size_t q = 0; q < g.size(); ++q) {
    long n2 = 0;
    if (g.dim() == 1) {
      const long k = g.wave_index(q);
      n2 = k * k;
    } else {
      const long k = g.wave_index(q / g.n());
      const long l = g.wave_index(q % g.n());
      n2 = k * k + l * l;
    }
    if (n2 > 0) ++out[n2];
  }
  return out;
}

double group_symbol(long n2) { return 4.0 * std::numbers::pi * std::numbers::pi * static_cast<double>(n2); }

}  // namespace

IndexSweep index_sweep(const GridSpec& grid, std::span<const double> alphas, std::span<const double> kappas) {
  IndexSweep out;
  for (double kappa : kappas) {
    for (double alpha : alphas) {
      const ModelParams p(grid, OrderSpec::constant(alpha), KappaSpec::constant(kappa));
      out.cells.push_back({kappa, alpha, homogeneous_index(p, 0.0).index});
    }
  }
  const double amin = alphas.empty() ? 0.0 : *std::min_element(alphas.begin(), alphas.end());
  const auto groups = wave_groups(grid);
  for (double kappa : kappas) {
    if (!(kappa > 0.0) || kappa >= 1.0) continue;
    for (const auto& [n2, mult] : groups) {
      (void)mult;
      const double a = 2.0 * std::log(1.0 / kappa) / std::log(group_symbol(n2));
      if (a > 2.0) continue;
      if (a < amin) break;
      out.jumps.push_back({kappa, n2, a});
    }
  }
  return out;
}

KappaMatch match_coefficient(const GridSpec& grid, double alpha, double kappa, std::span<const double> kappa_grid) {
  KappaMatch out;
  const ModelParams target(grid, OrderSpec::constant(alpha), KappaSpec::constant(kappa));
  out.target_index = homogeneous_index(target, 0.0).index;

  // Order 2: index(kappa') = 1 + #{modes with lambda < 1/kappa'}.
  const auto groups = wave_groups(grid);
  std::vector<std::pair<double, int>> levels;
  for (const auto& [n2, mult] : groups) levels.emplace_back(group_symbol(n2), mult);
  int count = 1;
  if (out.target_index == 1 && !levels.empty()) {
    out.interval = std::make_pair(1.0 / levels.front().first, std::numeric_limits<double>::infinity());
  }
  for (std::size_t j = 0; j < levels.size() && !out.interval; ++j) {
    count += levels[j].second;
    if (count == out.target_index) {
      const double lo = j + 1 < levels.size() ? 1.0 / levels[j + 1].first : 0.0;
      out.interval = std::make_pair(lo, 1.0 / levels[j].first);
    }
    if (count > out.target_index) break;
  }

  for (double k2 : kappa_grid) {
    const ModelParams m(grid, OrderSpec::constant(2.0), KappaSpec::constant(k2));
    if (homogeneous_index(m, 0.0).index == out.target_index) out.grid_hits.push_back(k2);
  }

  std::ostringstream diag;
  diag << "target index " << out.target_index;
  if (alpha == 2.0) {
    out.suggestion = kappa;
  } else if (out.interval && std::isfinite(out.interval->second) && out.interval->first > 0.0) {
    out.suggestion = std::sqrt(out.interval->first * out.interval->second);
  } else if (out.interval) {
    out.suggestion = std::isfinite(out.interval->second) ? 0.5 * out.interval->second : 2.0 * out.interval->first;
  } else if (!out.grid_hits.empty()) {
    out.suggestion = out.grid_hits[out.grid_hits.size() / 2];
  }
  if (!out.interval) diag << "; no order-2 coefficient reproduces it (a degenerate mode group is split)";
  if (out.interval) diag << "; interval [" << out.interval->first << ", " << out.interval->second << ")";
  diag << "; " << out.grid_hits.size() << " grid hits";
  out.diagnostics = diag.str();
  return out;
}

FamilyMatch match_coefficient(const ModelParams& target, std::span<const double> a_grid,
                              std::span<const double> b_grid) {
  FamilyMatch out;
  const GridSpec& g = target.grid();
  const RealField zero(g);
  out.target_index = compute_index(zero, target).index;
  for (double a : a_grid) {
    for (double b : b_grid) {
      if (a <= std::abs(b)) continue;
      auto kappa = RealField::sample(g, [&](double x) { return a + b * std::cos(2.0 * std::numbers::pi * x); });
      const ModelParams m(g, OrderSpec::constant(2.0), KappaSpec::variable(std::move(kappa)));
      if (compute_index(zero, m).index == out.target_index) out.hits.emplace_back(a, b);
    }
  }
  std::ostringstream diag;
  diag << "target index " << out.target_index << "; " << out.hits.size() << " matching (a, b) pairs";
  if (!out.hits.empty()) {
    double ca = 0.0, cb = 0.0;
    for (auto [a, b] : out.hits) {
      ca += a;
      cb += b;
    }
    ca /= static_cast<double>(out.hits.size());
    cb /= static_cast<double>(out.hits.size());
    auto dist = [&](const std::pair<double, double>& h) { return std::hypot(h.first - ca, h.second - cb); };
    out.suggestion = *std::min_element(out.hits.begin(), out.hits.end(),
                                       [&](const auto& x, const auto& y) { return dist(x) < dist(y); });
  } else {
    diag << "; no match in the search grid";
  }
  out.diagnostics = diag.str();
  return out;
}

}  // namespace fracscape

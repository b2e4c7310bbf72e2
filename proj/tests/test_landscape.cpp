#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "fracscape/errors.hpp"
#include "fracscape/landscape.hpp"
#include "fracscape/landscape_io.hpp"

using namespace fracscape;
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

namespace {

ModelParams model(int dim, std::size_t n, double alpha, double kappa = 0.02) {
  return ModelParams(GridSpec(dim, n), OrderSpec::constant(alpha), KappaSpec::constant(kappa));
}

double max_diff(const RealField& a, const RealField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

RealField bump(const GridSpec& g) {
  return RealField::sample(g, [](double x) { return 0.8 * std::exp(-40 * (x - 0.3) * (x - 0.3)) + 0.1 * std::sin(kTwoPi * 3 * x); });
}

RealField filled(const GridSpec& g, double v) {
  return RealField::sample(g, [v](double) { return v; });
}

// 1D, kappa = 0.02, alpha = 2 landscape shared by several cases.
struct Fixture {
  ModelParams p = model(1, 128, 2.0);
  SaddleConfig c;
  LandscapeOptions o;
  LandscapeGraph g;
  Fixture() {
    o.symmetries = default_symmetries(p);
    g = build_landscape(p, c, o);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

const LandscapeNode* node_with_index(const LandscapeGraph& g, int index) {
  for (const auto& n : g.nodes) {
    if (n.index == index) return &n;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("canonical form is invariant under the symmetry group") {
  const Symmetries both{true, true};
  for (int dim : {1, 2}) {
    const GridSpec g(dim, dim == 1 ? 64 : 16);
    const RealField u = dim == 1 ? bump(g)
                                 : RealField::sample(g, [](double x, double y) {
                                     return std::exp(-20 * ((x - 0.3) * (x - 0.3) + (y - 0.6) * (y - 0.6))) +
                                            0.2 * std::cos(kTwoPi * y);
                                   });
    const Canonical a = canonicalize(u, both);
    const Canonical b = canonicalize(dim == 1 ? shift(u, 7) : shift(u, 7, 3), both);
    const Canonical c = canonicalize(scaled(-1.0, u), both);
    CHECK(a.signature.id == b.signature.id);
    CHECK(a.signature.id == c.signature.id);
    CHECK(max_diff(a.u, b.u) <= 1e-12);
    CHECK(max_diff(a.u, c.u) <= 1e-12);
    CHECK(max_diff(a.u, scaled(a.sign, dim == 1 ? shift(u, a.shift_x) : shift(u, a.shift_x, a.shift_y))) == 0.0);

    const Canonical again = canonicalize(a.u, both);
    CHECK(again.signature.id == a.signature.id);
    CHECK(max_diff(again.u, a.u) == 0.0);
  }
}

TEST_CASE("canonicalization respects disabled symmetries") {
  const GridSpec g(1, 64);
  const RealField u = bump(g);
  CHECK(canonicalize(u, {true, false}).signature.id != canonicalize(scaled(-1.0, u), {true, false}).signature.id);
  CHECK(canonicalize(u, {false, false}).signature.id != canonicalize(shift(u, 5), {false, false}).signature.id);
  CHECK(canonicalize(u, {false, false}).signature.kind == Signature::Kind::raw);

  const Canonical plus = canonicalize(filled(g, 1.0), {true, true});
  const Canonical minus = canonicalize(filled(g, -1.0), {true, true});
  CHECK(plus.signature.kind == Signature::Kind::constant);
  CHECK(plus.signature.id != minus.signature.id);
}

TEST_CASE("default symmetries follow the model") {
  const GridSpec g(1, 32);
  const ModelParams var(g, OrderSpec::variable(RealField::sample(g, [](double x) { return 1.3 + 0.2 * std::cos(kTwoPi * x); })),
                        KappaSpec::constant(0.02), build_expansion(g, 20));
  const Symmetries s = default_symmetries(var);
  CHECK_FALSE(s.translation);
  CHECK_FALSE(s.sign);
  CHECK(default_symmetries(model(1, 32, 1.5)).translation);
}

TEST_CASE("1D order-2 landscape has four classes") {
  const LandscapeGraph& g = fixture().g;
  const auto classes = g.classes_by_index();
  CHECK(g.nodes.size() == 4);
  CHECK(classes.at(3) == 1);
  CHECK(classes.at(1) == 1);
  CHECK(classes.at(0) == 2);
  CHECK_FALSE(g.partial);
  CHECK(g.max_index() == 3);
}

TEST_CASE("landscape soundness") {
  const Fixture& f = fixture();
  for (const auto& n : f.g.nodes) {
    CHECK(l2_norm(rhs(n.u, f.p)) <= f.c.resid_tol);
    CHECK(n.residual <= f.c.resid_tol);
    CHECK(static_cast<int>(n.directions.size()) == n.index);
    if (n.index > 0 || n.u[0] != 0.0) CHECK(compute_index(n.u, f.p).index == n.index);
  }
  for (const auto& e : f.g.edges) {
    REQUIRE(f.g.find(e.from));
    REQUIRE(f.g.find(e.to));
    CHECK(e.mode == SearchMode::downward);
    CHECK(f.g.find(e.to)->index < f.g.find(e.from)->index);
  }
}

TEST_CASE("landscape is closed under the symmetries") {
  const Fixture& f = fixture();
  for (const auto& n : f.g.nodes) {
    for (const RealField& image : {scaled(-1.0, n.u), shift(n.u, 17)}) {
      const std::string id = canonicalize(image, f.o.symmetries).signature.id;
      CHECK(f.g.find(id) != nullptr);
    }
  }
}

TEST_CASE("searches below a minimum and empty ascents") {
  const Fixture& f = fixture();
  LandscapeGraph g = f.g;
  const LandscapeNode* one = node_with_index(g, 0);
  REQUIRE(one);
  const std::string id = one->id;
  CHECK(downward_search(g, id, f.p, f.c, SearchPlan{SearchMode::downward, {}, 0.1, 64}, f.o).empty());
  CHECK_THROWS_AS(downward_search(g, id, f.p, f.c, SearchPlan{SearchMode::downward, {0}, 0.1, 64}, f.o), ContractError);
  CHECK_THROWS_AS(upward_search(g, id, f.p, f.c, SearchPlan{SearchMode::upward, {0}, 0.1, 64}, f.o), ContractError);
  CHECK_THROWS_AS(downward_search(g, "missing", f.p, f.c, SearchPlan{SearchMode::downward, {}, 0.1, 64}, f.o),
                  ContractError);
}

TEST_CASE("upward search re-finds the downward children") {
  const Fixture& f = fixture();
  const LandscapeNode* saddle = node_with_index(f.g, 1);
  REQUIRE(saddle);

  // Index-1 class from its own child u = 1.
  LandscapeGraph g;
  const std::string plus = add_stationary(g, filled(f.p.grid(), 1.0), f.p, f.c, f.o);
  const auto found = upward_search(g, plus, f.p, f.c, SearchPlan{SearchMode::upward, {1}, 0.1, 64}, f.o);
  CHECK(std::find(found.begin(), found.end(), saddle->id) != found.end());
  for (const auto& e : g.edges) {
    CHECK(e.mode == SearchMode::upward);
    CHECK(e.to == plus);
  }

  // u0 from the index-1 saddle.
  LandscapeGraph h;
  const std::string s = add_stationary(h, saddle->u, f.p, f.c, f.o);
  CHECK(s == saddle->id);
  const auto up = upward_search(h, s, f.p, f.c, SearchPlan{SearchMode::upward, {3}, 0.1, 64}, f.o);
  CHECK(std::find(up.begin(), up.end(), f.g.nodes.front().id) != up.end());
}

TEST_CASE("landscape builds are deterministic") {
  const Fixture& f = fixture();
  const std::string first = graph_json(f.g);
  CHECK(graph_json(build_landscape(f.p, f.c, f.o)) == first);
  LandscapeOptions two = f.o;
  two.threads = 2;
  CHECK(graph_json(build_landscape(f.p, f.c, two)) == first);
}

TEST_CASE("budgets mark the graph partial") {
  const Fixture& f = fixture();
  LandscapeOptions o = f.o;
  o.node_budget = 2;
  const LandscapeGraph g = build_landscape(f.p, f.c, o);
  CHECK(g.nodes.size() == 2);
  CHECK(g.partial);
  CHECK_FALSE(g.warnings.empty());
}

TEST_CASE("index sweep") {
  const GridSpec g(1, 128);
  const std::vector<double> alphas{2.0, 1.5, 1.3, 1.2};
  const std::vector<double> kappas{0.02};
  const IndexSweep sweep = index_sweep(g, alphas, kappas);
  REQUIRE(sweep.cells.size() == 4);
  const int expect[] = {3, 5, 7, 9};
  for (std::size_t i = 0; i < 4; ++i) CHECK(sweep.cells[i].index == expect[i]);

  REQUIRE(sweep.jumps.size() == 3);
  CHECK(sweep.jumps[0].wave_norm2 == 4);
  CHECK(sweep.jumps[0].alpha_star == doctest::Approx(2 * std::log(50.0) / std::log(16 * kPi * kPi)));
  CHECK(sweep.jumps[0].alpha_star == doctest::Approx(1.546).epsilon(1e-3));
  CHECK(sweep.jumps[1].alpha_star == doctest::Approx(1.332).epsilon(1e-3));
  CHECK(sweep.jumps[2].alpha_star == doctest::Approx(1.213).epsilon(1e-3));

  std::vector<double> fine_a, fine_k;
  for (int i = 0; i <= 40; ++i) fine_a.push_back(1.0 + i * 0.025);
  for (int i = 0; i <= 10; ++i) fine_k.push_back(0.005 + i * 0.0025);
  for (int dim : {1, 2}) {
    const IndexSweep s = index_sweep(GridSpec(dim, 64), fine_a, fine_k);
    auto at = [&](std::size_t ik, std::size_t ia) { return s.cells[ik * fine_a.size() + ia].index; };
    for (std::size_t ik = 0; ik < fine_k.size(); ++ik) {
      for (std::size_t ia = 0; ia < fine_a.size(); ++ia) {
        if (ia + 1 < fine_a.size()) CHECK(at(ik, ia + 1) <= at(ik, ia));
        if (ik + 1 < fine_k.size()) CHECK(at(ik + 1, ia) <= at(ik, ia));
      }
    }
  }
}

TEST_CASE("matching an order-2 coefficient to a fractional model") {
  const GridSpec g(1, 128);
  std::vector<double> grid;
  for (int i = 1; i <= 100; ++i) grid.push_back(i * 1e-4);
  const KappaMatch m = match_coefficient(g, 1.5, 0.02, grid);
  CHECK(m.target_index == 5);
  REQUIRE(m.interval);
  CHECK(m.interval->first == doctest::Approx(1.0 / (36 * kPi * kPi)));
  CHECK(m.interval->second == doctest::Approx(1.0 / (16 * kPi * kPi)));
  CHECK_FALSE((m.interval->first <= 0.01 && 0.01 < m.interval->second));
  REQUIRE(m.suggestion);
  CHECK(homogeneous_index(model(1, 128, 2.0, *m.suggestion), 0.0).index == 5);
  CHECK(m.grid_hits.front() == doctest::Approx(0.0029));
  CHECK(m.grid_hits.back() == doctest::Approx(0.0063));
  for (double k : m.grid_hits) CHECK(homogeneous_index(model(1, 128, 2.0, k), 0.0).index == 5);

  const KappaMatch self = match_coefficient(g, 2.0, 0.02, grid);
  REQUIRE(self.suggestion);
  CHECK(*self.suggestion == 0.02);

  const KappaMatch none = match_coefficient(g, 1.5, 0.02, std::vector<double>{0.05, 0.1});
  CHECK(none.grid_hits.empty());
  CHECK_FALSE(none.diagnostics.empty());
}

TEST_CASE("matching a variable coefficient to a variable-order model") {
  const GridSpec g(1, 64);
  const ModelParams target(g, OrderSpec::variable(RealField::sample(g, [](double x) { return 1.3 + 0.2 * std::cos(kTwoPi * x); })),
                           KappaSpec::constant(0.02), build_expansion(g, 40));
  std::vector<double> as, bs;
  for (int i = 1; i <= 8; ++i) as.push_back(i * 1e-3);
  for (int i = 0; i <= 4; ++i) bs.push_back(i * 1e-3);
  const FamilyMatch m = match_coefficient(target, as, bs);
  CHECK(m.target_index == compute_index(RealField(g), target).index);
  REQUIRE(m.suggestion);
  CHECK(std::find(m.hits.begin(), m.hits.end(), std::make_pair(3e-3, 2e-3)) != m.hits.end());
  for (auto [a, b] : m.hits) {
    CHECK(a > std::abs(b));
    const ModelParams cand(g, OrderSpec::constant(2.0),
                           KappaSpec::variable(RealField::sample(g, [&](double x) { return a + b * std::cos(kTwoPi * x); })));
    CHECK(compute_index(RealField(g), cand).index == m.target_index);
  }
}

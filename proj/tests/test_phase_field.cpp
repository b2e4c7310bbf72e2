#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "fracscape/errors.hpp"
#include "fracscape/phase_field.hpp"

using namespace fracscape;
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

namespace {

ModelParams model(int dim, std::size_t n, double alpha, double kappa = 0.02) {
  return ModelParams(GridSpec(dim, n), OrderSpec::constant(alpha), KappaSpec::constant(kappa));
}

RealField filled(const GridSpec& g, double v) {
  return RealField::sample(g, [v](double) { return v; });
}

// Brute-force count of unstable Fourier modes of a constant state.
std::pair<int, int> count_modes(int dim, int n, double alpha, double kappa, double state) {
  int index = 0, degenerate = 0;
  const int lo = -n / 2, hi = n / 2;
  for (int k = lo; k < hi; ++k) {
    for (int l = (dim == 1 ? 0 : lo); l < (dim == 1 ? 1 : hi); ++l) {
      const double lambda = 4 * kPi * kPi * (k * k + l * l);
      const double ev = 1 - 3 * state * state - kappa * std::pow(lambda, alpha / 2);
      if (std::abs(ev) <= 1e-12) {
        ++degenerate;
      } else if (ev > 0) {
        ++index;
      }
    }
  }
  return {index, degenerate};
}

}  // namespace

TEST_CASE("homogeneous states are stationary") {
  for (int dim : {1, 2}) {
    const ModelParams p = model(dim, dim == 1 ? 128 : 32, 1.5);
    for (double v : {0.0, 1.0, -1.0}) CHECK(max_abs(rhs(filled(p.grid(), v), p).values()) <= 1e-14);
  }
  const GridSpec g(1, 64);
  const ModelParams var(g, OrderSpec::variable(RealField::sample(g, [](double x) { return 1.3 + 0.2 * std::cos(kTwoPi * x); })),
                        KappaSpec::constant(0.02), build_expansion(g, 30));
  for (double v : {0.0, 1.0, -1.0}) CHECK(max_abs(rhs(filled(g, v), var).values()) <= 1e-13);
}

TEST_CASE("force is odd") {
  const ModelParams p = model(1, 64, 1.3);
  const auto u = RealField::sample(p.grid(), [](double x) { return 0.7 * std::sin(kTwoPi * x) + 0.2; });
  const RealField a = rhs(u, p);
  const RealField b = rhs(scaled(-1.0, u), p);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(-b[i]).epsilon(1e-13));
}

TEST_CASE("force on a single mode matches the closed form") {
  const double kappa = 0.02, alpha = 1.5, a = 0.3;
  const ModelParams p = model(1, 64, alpha, kappa);
  const auto u = RealField::sample(p.grid(), [&](double x) { return a * std::sin(kTwoPi * 2 * x); });
  const double lam = std::pow(16 * kPi * kPi, alpha / 2);
  const auto expect = RealField::sample(p.grid(), [&](double x) {
    const double s = a * std::sin(kTwoPi * 2 * x);
    return -kappa * lam * s + s - s * s * s;
  });
  const RealField got = rhs(u, p);
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("energy against quadrature of the analytic integrand") {
  const double kappa = 0.03, a = 0.4;
  const ModelParams p = model(1, 256, 2.0, kappa);
  const auto u = RealField::sample(p.grid(), [&](double x) { return a * std::cos(kTwoPi * x); });
  // int (kappa/2)(u')^2 = kappa/2 * a^2 (2 pi)^2 / 2; int (1-u^2)^2/4 by the
  // moments <cos^2> = 1/2, <cos^4> = 3/8.
  const double grad = 0.5 * kappa * a * a * kTwoPi * kTwoPi * 0.5;
  const double bulk = 0.25 * (1 - 2 * a * a * 0.5 + a * a * a * a * 3.0 / 8.0);
  CHECK(energy(u, p) == doctest::Approx(grad + bulk).epsilon(1e-12));
  CHECK(energy(filled(p.grid(), 1.0), p) == doctest::Approx(0.0));

  CHECK_THROWS_AS(energy(u, model(1, 256, 1.5)), UnsupportedModelError);
}

TEST_CASE("energy decreases along explicit gradient flow") {
  const ModelParams p = model(2, 32, 2.0);
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> d(-0.5, 0.5);
  std::vector<double> v(p.grid().size());
  for (auto& x : v) x = d(rng);
  RealField u(p.grid(), v);
  double e = energy(u, p);
  for (int i = 0; i < 200; ++i) {
    u = combine(1.0, u, 1e-3, rhs(u, p));
    const double next = energy(u, p);
    CHECK(next <= e);
    e = next;
  }
}

TEST_CASE("variable kappa needs order 2") {
  const GridSpec g(1, 32);
  const auto kap = RealField::sample(g, [](double x) { return 0.02 + 0.01 * std::cos(kTwoPi * x); });
  CHECK_THROWS_AS(ModelParams(g, OrderSpec::constant(1.5), KappaSpec::variable(kap)), ConfigError);
  CHECK_THROWS_AS(KappaSpec::constant(0.0), DomainError);

  const ModelParams p(g, OrderSpec::constant(2.0), KappaSpec::variable(kap));
  CHECK_FALSE(p.is_gradient());
  const auto u = RealField::sample(g, [](double x) { return 0.5 * std::sin(kTwoPi * x); });
  const RealField got = rhs(u, p);
  for (std::size_t i = 0; i < g.n(); ++i) {
    const double x = i * g.h();
    const double s = 0.5 * std::sin(kTwoPi * x);
    const double expect = -kap[i] * kTwoPi * kTwoPi * s + s - s * s * s;
    CHECK(got[i] == doctest::Approx(expect).epsilon(1e-11).scale(1.0));
  }
  CHECK_THROWS_AS(energy(u, p), UnsupportedModelError);
}

TEST_CASE("jacobian action needs a unit direction") {
  const ModelParams p = model(1, 32, 2.0);
  const RealField u(p.grid());
  CHECK_THROWS_AS(jacobian_apply(u, filled(p.grid(), 2.0), p), ContractError);
  CHECK_NOTHROW(jacobian_apply(u, filled(p.grid(), 1.0), p));
}

TEST_CASE("dimer error is second order in the length") {
  const ModelParams p = model(1, 128, 1.5);
  const auto u = RealField::sample(p.grid(), [](double x) { return 0.6 * std::tanh(5 * std::sin(kTwoPi * x)); });
  const auto raw = RealField::sample(p.grid(), [](double x) { return std::cos(kTwoPi * x) + 0.3 * std::sin(kTwoPi * 3 * x); });
  const RealField v = scaled(1.0 / l2_norm(raw), raw);

  // Exact action: -kappa (-Delta)^{alpha/2} v + (1 - 3 u^2) v.
  const RealField diff = constant_order_apply(v, 1.5);
  std::vector<double> ex(v.size());
  for (std::size_t i = 0; i < ex.size(); ++i) ex[i] = -0.02 * diff[i] + (1 - 3 * u[i] * u[i]) * v[i];
  const RealField exact(p.grid(), ex);

  std::vector<double> xs, ys;
  for (double l : {1e-1, 5e-2, 2.5e-2, 1.25e-2, 6.25e-3}) {
    const RealField j = jacobian_apply(u, v, p, DimerParams{l});
    xs.push_back(std::log(l));
    ys.push_back(std::log(l2_norm(combine(1.0, j, -1.0, exact))));
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  CHECK(slope >= 1.7);
  CHECK(slope <= 2.3);
}

TEST_CASE("homogeneous index table") {
  struct Row {
    int dim;
    double alpha;
    int expect;
  };
  for (const Row& r : {Row{1, 2.0, 3}, Row{1, 1.5, 5}, Row{1, 1.3, 7}, Row{1, 1.2, 9}, Row{2, 2.0, 5}, Row{2, 1.7, 9},
                       Row{2, 1.5, 13}}) {
    const int n = r.dim == 1 ? 128 : 64;
    const auto oracle = count_modes(r.dim, n, r.alpha, 0.02, 0.0);
    CHECK(oracle.first == r.expect);
    const HomogeneousIndex got = homogeneous_index(model(r.dim, n, r.alpha), 0.0);
    CHECK(got.index == r.expect);
    CHECK(got.degenerate == 0);
  }
  CHECK(homogeneous_index(model(1, 128, 1.5), 1.0).index == 0);
  CHECK(homogeneous_index(model(2, 32, 1.5), -1.0).index == 0);

  const HomogeneousIndex critical = homogeneous_index(model(1, 64, 2.0, 1.0 / (4 * kPi * kPi)), 0.0);
  CHECK(critical.index == 1);
  CHECK(critical.degenerate == 2);

  const GridSpec g(1, 16);
  const ModelParams var(g, OrderSpec::variable(filled(g, 1.5)), KappaSpec::constant(0.02), build_expansion(g, 10));
  CHECK_THROWS_AS(homogeneous_index(var, 0.0), UnsupportedModelError);
}

// Acceptance checks. Prints one PASS/FAIL line per criterion; exits non-zero
// if any criterion fails. Optional arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fracscape/landscape.hpp"
#include "fracscape/landscape_io.hpp"

using namespace fracscape;
using Clock = std::chrono::steady_clock;
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

double max_diff(const RealField& a, const RealField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ModelParams model(int dim, std::size_t n, double alpha, double kappa = 0.02) {
  return ModelParams(GridSpec(dim, n), OrderSpec::constant(alpha), KappaSpec::constant(kappa));
}

RealField poly(const GridSpec& g) {
  return RealField::sample(g, [](double x) { return x * x * (1 - x) * (1 - x); });
}

OrderSpec sine_order(const GridSpec& g) {
  return OrderSpec::variable(RealField::sample(g, [](double x) { return 1.5 + 0.4 * std::sin(kTwoPi * x); }));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Verdict fast_accuracy() {
  const GridSpec g(1, 4096);
  const RealField u = poly(g);
  const OrderSpec a = sine_order(g);
  const RealField direct = variable_order_apply_direct(u, a);
  std::vector<double> errs;
  std::ostringstream curve;
  for (std::size_t s = 0; s <= 35; ++s) {
    errs.push_back(max_diff(variable_order_apply_fast(u, a, build_expansion(g, s)), direct));
    if (s % 5 == 0) curve << " S" << s << "=" << fmt(errs.back());
  }
  bool monotone = true;
  for (std::size_t s = 1; s < errs.size(); ++s) monotone = monotone && errs[s] <= errs[s - 1];
  const bool pass = errs[30] <= 1e-10 && errs[35] <= 1e-12 && monotone;
  return {pass, "err(S=30)=" + fmt(errs[30]) + " err(S=35)=" + fmt(errs[35]) +
                    " non-increasing=" + (monotone ? "yes" : "no") + ";" + curve.str()};
}

Verdict remainder_certificate() {
  double worst_ratio = 0.0;
  std::ostringstream d;
  for (std::size_t n : {64, 1024}) {
    for (int m : {2, 4, 8}) {
      const std::size_t s = select_expansion_order(m, GridSpec(1, n));
      double worst = 0.0;
      for (int a = 0; a < 50; ++a) {
        const long k = 1 + std::lround(a * (n / 2.0 - 1) / 49.0);
        for (int b = 0; b < 50; ++b) {
          const double z = 2.0 * (b + 1) / 50.0;
          worst = std::max(worst, remainder_probe(k, z, s));
        }
      }
      const double bound = std::pow(static_cast<double>(n), -m);
      worst_ratio = std::max(worst_ratio, worst / bound);
      d << " N=" << n << ",m=" << m << ",S=" << s << ":" << fmt(worst) << "/" << fmt(bound);
    }
  }
  return {worst_ratio <= 1.0, "max remainder / bound = " + fmt(worst_ratio) + ";" + d.str()};
}

Verdict complexity_shape() {
  const std::vector<std::size_t> ns{4096, 8192, 16384, 32768};
  constexpr int repeats = 5;
  std::vector<double> direct, fast;
  for (std::size_t n : ns) {
    const GridSpec g(1, n);
    const RealField u = poly(g);
    const OrderSpec a = sine_order(g);
    const ExpansionPlan plan = build_expansion(g, 30);
    variable_order_apply_fast(u, a, plan);  // warm-up: FFT plans
    std::vector<double> td, tf;
    for (int r = 0; r < repeats; ++r) {
      auto t0 = Clock::now();
      const RealField x = variable_order_apply_direct(u, a);
      td.push_back(seconds_since(t0));
      t0 = Clock::now();
      const RealField y = variable_order_apply_fast(u, a, plan);
      tf.push_back(seconds_since(t0));
    }
    direct.push_back(median(td));
    fast.push_back(median(tf));
  }
  bool pass = true;
  std::ostringstream d;
  d << "direct ratios";
  for (std::size_t i = 1; i < ns.size(); ++i) {
    const double r = direct[i] / direct[i - 1];
    pass = pass && r >= 3.4;
    d << " " << fmt(r);
  }
  d << "; fast ratios";
  for (std::size_t i = 1; i < ns.size(); ++i) {
    const double r = fast[i] / fast[i - 1];
    pass = pass && r <= 2.8;
    d << " " << fmt(r);
  }
  const double speedup = direct.back() / fast.back();
  pass = pass && speedup >= 10.0;
  d << "; speedup at 32768 = " << fmt(speedup) << " (direct " << fmt(direct.back()) << " s, fast "
    << fmt(fast.back()) << " s)";
  return {pass, d.str()};
}

Verdict index_table() {
  bool pass = true;
  std::ostringstream d;
  const double alphas[] = {2.0, 1.5, 1.3, 1.2};
  const int expect[] = {3, 5, 7, 9};
  for (int i = 0; i < 4; ++i) {
    const ModelParams p = model(1, 128, alphas[i]);
    const int analytic = homogeneous_index(p, 0.0).index;
    const int dense = compute_index(RealField(p.grid()), p).index;
    pass = pass && analytic == expect[i] && dense == expect[i];
    d << " 1D a=" << alphas[i] << ":" << analytic << "/" << dense;
  }
  const ModelParams p2 = model(2, 64, 2.0);
  const int analytic = homogeneous_index(p2, 0.0).index;
  const int dense = compute_index(RealField(p2.grid()), p2).index;
  pass = pass && analytic == 5 && dense == 5;
  d << " 2D a=2:" << analytic << "/" << dense << " (analytic/dense)";
  return {pass, d.str()};
}

Verdict landscape_2d() {
  const auto t0 = Clock::now();
  const ModelParams p = model(2, 64, 2.0);
  const SaddleConfig c;
  LandscapeOptions o;
  o.symmetries = default_symmetries(p);
  const LandscapeGraph g = build_landscape(p, c, o);
  const double elapsed = seconds_since(t0);

  bool square = false, plus = false, minus = false;
  int stripes = 0;
  double worst = 0.0;
  for (const auto& n : g.nodes) {
    worst = std::max(worst, l2_norm(rhs(n.u, p)));
    const auto [lo, hi] = std::minmax_element(n.u.values().begin(), n.u.values().end());
    const bool constant = *hi - *lo < 1e-12;
    if (n.index == 2 && !constant) square = true;
    if (n.index == 1 && !constant) ++stripes;
    if (n.index == 0 && constant && std::abs(*hi - 1.0) < 1e-10) plus = true;
    if (n.index == 0 && constant && std::abs(*lo + 1.0) < 1e-10) minus = true;
  }
  std::ostringstream d;
  d << "root index " << g.nodes.front().index << "; classes by index:";
  for (auto [index, count] : g.classes_by_index()) d << " " << index << "x" << count;
  d << "; max residual " << fmt(worst) << "; " << fmt(elapsed) << " s";
  const bool pass = g.nodes.front().index == 5 && square && stripes >= 1 && plus && minus && worst <= 1e-8 &&
                    elapsed <= 1800.0;
  return {pass, d.str()};
}

// Index-1 saddle reached from u0 plus a small sine, polished and indexed.
RealField index_one_saddle(const ModelParams& p, int& index) {
  SaddleConfig c;
  c.k = 1;
  const auto seed = RealField::sample(p.grid(), [](double x) { return 0.1 * std::sqrt(2.0) * std::sin(kTwoPi * x); });
  auto [s, r] = run(SaddleState{seed, softest_modes(p.grid(), 1)}, p, c);
  c.resid_tol = 1e-11;
  auto [t, q] = run(s, p, c);
  index = q.converged ? compute_index(t.u, p).index : -1;
  return t.u;
}

Verdict sharper_interfaces() {
  const double alphas[] = {2.0, 1.7, 1.5};
  std::vector<int> widths;
  std::vector<double> peaks;
  bool indexed = true;
  std::ostringstream d;
  for (double a : alphas) {
    const ModelParams p = model(1, 128, a);
    int index = 0;
    const RealField u = index_one_saddle(p, index);
    indexed = indexed && index == 1;
    int width = 0;
    for (double v : u.values()) width += std::abs(v) < 0.9;
    widths.push_back(width);
    peaks.push_back(max_abs(u.values()));
    d << " a=" << a << ": index " << index << ", width " << width << ", max|u| " << fmt(peaks.back()) << ";";
  }
  const bool narrowing = widths[0] > widths[1] && widths[1] > widths[2];
  const bool below_one = peaks[1] < 1.0 && peaks[2] < 1.0;
  const bool order2_closest = peaks[0] > peaks[1] && peaks[0] > peaks[2];
  d << " strictly narrowing=" << (narrowing ? "yes" : "no") << ", fractional max<1=" << (below_one ? "yes" : "no")
    << ", order-2 max closest to 1=" << (order2_closest ? "yes" : "no");
  return {indexed && narrowing && below_one && order2_closest, d.str()};
}

Verdict variable_order_asymmetry() {
  const GridSpec g(1, 64);
  const ModelParams p(g, OrderSpec::variable(RealField::sample(g, [](double x) { return 1.3 + 0.2 * std::cos(kTwoPi * x); })),
                      KappaSpec::constant(0.02), build_expansion(g, select_expansion_order(8, g)));
  const SaddleConfig c;
  LandscapeOptions o;
  o.symmetries = default_symmetries(p);
  LandscapeGraph graph;
  graph.nodes.push_back(homogeneous_root(p, c, o));
  const int root_index = graph.nodes.front().index;
  const auto found =
      downward_search(graph, graph.nodes.front().id, p, c, SearchPlan{SearchMode::downward, {1}, o.epsilon, 64}, o);
  double best = 0.0;
  int saddles = 0;
  for (const auto& id : found) {
    const LandscapeNode* n = graph.find(id);
    const auto [lo, hi] = std::minmax_element(n->u.values().begin(), n->u.values().end());
    if (*hi - *lo < 1e-6 || n->residual > c.resid_tol) continue;
    ++saddles;
    best = std::max(best, l2_norm(rhs(shift(n->u, static_cast<long>(g.n() / 4)), p)));
  }
  std::ostringstream d;
  d << "u0 index " << root_index << "; " << saddles << " converged non-homogeneous index-1 classes; max ||F(shift(u*, N/4))|| = "
    << fmt(best) << " (threshold " << fmt(1e3 * c.resid_tol) << ")";
  return {saddles > 0 && best > 1e3 * c.resid_tol, d.str()};
}

Verdict property_suites() {
  std::ostringstream d;
  bool pass = true;

  double rt = 0.0, pars = 0.0;
  for (int dim : {1, 2}) {
    const GridSpec g(dim, dim == 1 ? 1024 : 64);
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> dist(-1, 1);
    std::vector<double> v(g.size());
    for (auto& x : v) x = dist(rng);
    const RealField u(g, v);
    const SpectralField uh = forward_transform(u);
    rt = std::max(rt, max_diff(inverse_transform(uh).field, u));
    double spec = 0.0;
    for (const auto& cc : uh.coeffs()) spec += std::norm(cc);
    pars = std::max(pars, std::abs(spec - l2_norm(u) * l2_norm(u)));
  }
  pass = pass && rt <= 1e-12 && pars <= 1e-10;
  d << "round-trip " << fmt(rt) << ", Parseval " << fmt(pars);

  const ModelParams p = model(1, 128, 1.5);
  SaddleConfig c;
  c.k = 3;
  SaddleState s{RealField::sample(p.grid(), [](double x) { return 0.3 * std::sin(kTwoPi * x) + 0.1 * std::cos(kTwoPi * 2 * x); }),
                softest_modes(p.grid(), 3)};
  double gram = 0.0;
  for (int i = 0; i < 2000; ++i) {
    s = step(s, p, c);
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) gram = std::max(gram, std::abs(inner(s.directions[a], s.directions[b]) - (a == b)));
    }
  }
  pass = pass && gram <= 1e-10;
  d << ", VtV-I " << fmt(gram);

  double f0 = 0.0;
  for (double v : {0.0, 1.0, -1.0}) {
    f0 = std::max(f0, max_abs(rhs(RealField::sample(p.grid(), [v](double) { return v; }), p).values()));
  }
  pass = pass && f0 <= 1e-14;
  d << ", F(0,+-1) " << fmt(f0);

  const auto u = RealField::sample(p.grid(), [](double x) { return 0.6 * std::tanh(5 * std::sin(kTwoPi * x)); });
  const auto raw = RealField::sample(p.grid(), [](double x) { return std::cos(kTwoPi * x) + 0.3 * std::sin(kTwoPi * 3 * x); });
  const RealField v = scaled(1.0 / l2_norm(raw), raw);
  const RealField diff = constant_order_apply(v, 1.5);
  std::vector<double> ex(v.size());
  for (std::size_t i = 0; i < ex.size(); ++i) ex[i] = -0.02 * diff[i] + (1 - 3 * u[i] * u[i]) * v[i];
  const RealField exact(p.grid(), ex);
  std::vector<double> xs, ys;
  for (double l : {1e-1, 5e-2, 2.5e-2, 1.25e-2, 6.25e-3}) {
    xs.push_back(std::log(l));
    ys.push_back(std::log(l2_norm(combine(1.0, jacobian_apply(u, v, p, DimerParams{l}), -1.0, exact))));
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / 5, my = std::accumulate(ys.begin(), ys.end(), 0.0) / 5;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 5; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  pass = pass && slope >= 1.7 && slope <= 2.3;
  d << ", dimer slope " << fmt(slope);

  const ModelParams q = model(1, 128, 2.0);
  LandscapeOptions o;
  o.symmetries = default_symmetries(q);
  o.seed = 7;
  const std::string first = graph_json(build_landscape(q, SaddleConfig{}, o));
  const std::string second = graph_json(build_landscape(q, SaddleConfig{}, o));
  o.threads = 2;
  const std::string threaded = graph_json(build_landscape(q, SaddleConfig{}, o));
  const bool same = first == second && first == threaded;
  pass = pass && same;
  d << ", graph determinism " << (same ? "identical" : "DIFFERENT");
  return {pass, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"fast operator accuracy (1D, N=4096, S=30/35)", fast_accuracy},
      {"remainder certificate (N in {64,1024}, m in {2,4,8})", remainder_certificate},
      {"complexity shape (N=4096..32768, median of 5)", complexity_shape},
      {"homogeneous index table (analytic vs dense)", index_table},
      {"2D landscape skeleton (kappa=0.02, alpha=2, N=64)", landscape_2d},
      {"sharper interfaces with smaller alpha", sharper_interfaces},
      {"variable-order asymmetry of translates", variable_order_asymmetry},
      {"property suites", property_suites},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(number)) continue;
    Verdict v;
    const auto t0 = Clock::now();
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << number << ": " << criteria[i].first << " | "
              << v.detail << " [" << fmt(seconds_since(t0)) << " s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}

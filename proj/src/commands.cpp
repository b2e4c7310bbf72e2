#include "fracscape/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <system_error>

#include "fracscape/errors.hpp"
#include "fracscape/field_io.hpp"
#include "fracscape/frac_operator.hpp"
#include "fracscape/landscape_io.hpp"
#include "json.hpp"

namespace fracscape {

namespace {

using Clock = std::chrono::steady_clock;

std::filesystem::path prepare_out(const RunConfig& c) {
  std::error_code ec;
  std::filesystem::create_directories(c.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + c.output_dir.string() + ": " + ec.message());
  return c.output_dir;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  return os;
}

RealField builtin_input(const std::string& name, const GridSpec& g, const std::filesystem::path& base_dir) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (name == "poly") {
    return RealField::sample(g, [&](double x, double y) {
      const double px = x * x * (1 - x) * (1 - x);
      return g.dim() == 1 ? px : px * y * y * (1 - y) * (1 - y);
    });
  }
  if (name == "sin") return RealField::sample(g, [&](double x) { return std::sin(two_pi * x); });
  if (name == "const") return RealField::sample(g, [](double) { return 1.0; });
  std::filesystem::path path(name);
  if (path.is_relative() && !base_dir.empty() && !std::filesystem::exists(path)) path = base_dir / path;
  RealField f = read_field_csv(path);
  if (!(f.grid() == g)) throw ConfigError("input field " + path.string() + " does not match the configured grid");
  return f;
}

// "direct": per-point synthesis for variable orders, the plain constant path
// otherwise. "fast": the expansion for either.
RealField apply_direct(const RealField& u, const OrderSpec& order) {
  return order.is_constant() ? constant_order_apply(u, order.constant_value())
                             : variable_order_apply_direct(u, order);
}

std::optional<RealField> apply_direct(const RealField& u, const OrderSpec& order, Clock::time_point deadline) {
  if (order.is_constant()) return constant_order_apply(u, order.constant_value());
  return variable_order_apply_direct(u, order, deadline);
}

double max_abs_diff(const RealField& a, const RealField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::string cpu_model() {
  std::ifstream is("/proc/cpuinfo");
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) return line.substr(line.find_first_not_of(' ', colon + 1));
    }
  }
  return "unknown";
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string iso_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<double> linspace(double lo, double hi, int steps) {
  std::vector<double> out;
  if (steps == 1) return {lo};
  for (int i = 0; i < steps; ++i) out.push_back(lo + (hi - lo) * i / (steps - 1));
  return out;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const UnsupportedModelError*>(&e)) return kExitConfig;
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  return kExitNumeric;
}

int cmd_op_eval(const RunConfig& c, std::ostream& out) {
  const GridSpec g = make_grid(c);
  const OrderSpec order = make_order(c, g);
  const RealField u = builtin_input(c.op_input, g, c.base_dir);
  const auto dir = prepare_out(c);

  auto fast = [&] {
    const ExpansionPlan plan = build_expansion(g, expansion_order(c, g));
    return variable_order_apply_fast(u, order, plan);
  };
  RealField result = c.op_method == "direct" ? apply_direct(u, order) : fast();
  for (double x : result.values()) {
    if (!std::isfinite(x)) throw DomainError("operator result is not finite");
  }
  write_field_csv(dir / "op_eval.csv", result);
  out << std::setprecision(6) << "method=" << c.op_method << " max_abs=" << max_abs(result.values())
      << " l2=" << l2_norm(result) << "\n";
  if (c.op_method == "both") {
    const RealField direct = apply_direct(u, order);
    write_field_csv(dir / "op_eval_direct.csv", direct);
    out << "maxAbsErr=" << std::setprecision(3) << max_abs_diff(result, direct) << "\n";
  }
  return kExitOk;
}

int cmd_bench(const RunConfig& c, int threads, std::ostream& out) {
  const auto dir = prepare_out(c);
  std::ostringstream csv;
  csv << "# cpu=" << cpu_model() << "\n# threads=" << threads << "\n";
  csv << "method,N,S,wall_time_s,max_abs_err_vs_direct,status\n";
  csv << std::setprecision(6);
  const auto timeout = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(c.bench_timeout));

  for (std::size_t n : c.bench_n) {
    RunConfig cn = c;
    cn.n = n;
    const GridSpec g = make_grid(cn);
    const OrderSpec order = make_order(cn, g);
    const RealField u = builtin_input("poly", g, {});

    std::optional<RealField> direct;
    std::vector<double> times;
    bool timed_out = false;
    const auto deadline = Clock::now() + timeout;
    for (int r = 0; r < c.bench_repeats && !timed_out; ++r) {
      const auto t0 = Clock::now();
      auto res = apply_direct(u, order, deadline);
      times.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
      if (!res) {
        timed_out = true;
      } else {
        direct = std::move(res);
      }
    }
    if (timed_out) {
      csv << "direct," << n << ",0,,,timeout\n";
      direct.reset();
    } else {
      csv << "direct," << n << ",0," << median(times) << ",0,ok\n";
    }
    out << "N=" << n << " direct " << (timed_out ? "timeout" : "ok") << "\n";

    for (std::size_t s : c.bench_s) {
      const ExpansionPlan plan = build_expansion(g, s);
      (void)variable_order_apply_fast(u, order, plan);  // warm the transform plans
      std::vector<double> ft;
      std::optional<RealField> fast;
      for (int r = 0; r < c.bench_repeats; ++r) {
        const auto t0 = Clock::now();
        fast = variable_order_apply_fast(u, order, plan);
        ft.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
      }
      csv << "fast," << n << ',' << s << ',' << median(ft) << ',';
      if (direct) {
        csv << max_abs_diff(*fast, *direct);
      } else {
        csv << "nan";
      }
      csv << ",ok\n";
    }
  }
  auto os = open_out(dir / "bench.csv");
  os << csv.str();
  out << "wrote " << (dir / "bench.csv").string() << "\n";
  return kExitOk;
}

int cmd_saddle(const RunConfig& c, std::ostream& out) {
  const ModelParams p = make_model(c);
  const GridSpec& g = p.grid();
  const auto dir = prepare_out(c);

  std::optional<double> homogeneous;
  RealField u(g);
  if (c.saddle_seed == "u0" || c.saddle_seed == "u1" || c.saddle_seed == "u-1") {
    homogeneous = c.saddle_seed == "u0" ? 0.0 : (c.saddle_seed == "u1" ? 1.0 : -1.0);
    u = RealField::sample(g, [&](double) { return *homogeneous; });
  } else {
    u = builtin_input(c.saddle_seed, g, c.base_dir);
  }
  if (c.perturb_mode > 0 && c.perturb_amplitude != 0.0) {
    const auto modes = softest_modes(g, static_cast<std::size_t>(c.perturb_mode));
    u = combine(1.0, u, c.perturb_amplitude, modes.back());
  }

  int k = 0;
  if (c.saddle_k) {
    k = *c.saddle_k;
  } else if (homogeneous && p.is_gradient()) {
    k = homogeneous_index(p, *homogeneous).index;
  } else {
    k = compute_index(u, p).index;
  }
  SaddleConfig sc = c.saddle;
  sc.k = k;
  sc.validate();

  std::ofstream traj;
  TrajectoryLog log;
  if (c.log_stride > 0) {
    traj = open_out(dir / "saddle_trajectory.csv");
    traj << std::setprecision(10);
    log = TrajectoryLog{&traj, c.log_stride};
  }
  auto [state, report] = run(SaddleState{u, softest_modes(g, static_cast<std::size_t>(k)), 0, 0.0}, p, sc, log);

  std::optional<IndexResult> index;
  if (g.size() <= kDenseIndexCap) index = compute_index(state.u, p);
  write_field_csv(dir / "saddle_field.csv", state.u);

  nlohmann::json doc = {{"converged", report.converged},
                        {"status", report.status},
                        {"k", k},
                        {"iters", report.iters},
                        {"final_residual", report.final_residual},
                        {"direction_change", report.direction_change},
                        {"tau_used", report.tau_used}};
  if (index) {
    const std::size_t keep = std::min(index->eigenvalues.size(), static_cast<std::size_t>(index->index) + 8);
    doc["index"] = index->index;
    doc["degenerate"] = index->degenerate;
    doc["eigenvalues"] = std::vector<double>(index->eigenvalues.begin(), index->eigenvalues.begin() + static_cast<long>(keep));
  } else {
    doc["index"] = nullptr;
    doc["eigenvalues"] = nullptr;
  }
  auto os = open_out(dir / "saddle_report.json");
  os << doc.dump(2) << "\n";

  out << "status=" << report.status << " iters=" << report.iters << " residual=" << std::setprecision(3)
      << report.final_residual;
  if (index) out << " index=" << index->index;
  out << "\n";
  return report.converged ? kExitOk : kExitNotConverged;
}

int cmd_landscape(const RunConfig& c, int threads, std::ostream& out) {
  const ModelParams p = make_model(c);
  LandscapeOptions o = landscape_options(c, p);
  o.threads = threads;
  const auto dir = prepare_out(c);
  const std::string started = iso_now();
  const auto t0 = Clock::now();
  const LandscapeGraph g = build_landscape(p, c.saddle, o);
  const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
  write_landscape(dir, g);
  const nlohmann::json meta = {
      {"started", started}, {"finished", iso_now()}, {"elapsed_s", elapsed}, {"threads", threads}};
  auto os = open_out(dir / "metadata.json");
  os << meta.dump(2) << "\n";

  out << "nodes=" << g.nodes.size() << " edges=" << g.edges.size() << " rejected_runs=" << g.rejections.size()
      << "\n";
  for (const auto& [index, count] : g.classes_by_index()) out << "  index " << index << ": " << count << "\n";
  if (g.partial) {
    for (const auto& w : g.warnings) out << "warning: " << w << "\n";
  }
  return kExitOk;
}

int cmd_index_map(const RunConfig& c, std::ostream& out) {
  const GridSpec g = make_grid(c);
  if (!make_order(c, g).is_constant()) throw ConfigError("index-map needs a constant-order template");
  const auto alphas = linspace(c.alpha_min, c.alpha_max, c.alpha_steps);
  const auto kappas = linspace(c.kappa_min, c.kappa_max, c.kappa_steps);
  const IndexSweep s = index_sweep(g, alphas, kappas);
  const auto dir = prepare_out(c);
  {
    auto os = open_out(dir / "index_map.csv");
    write_index_map_csv(os, s);
  }
  auto os = open_out(dir / "index_jumps.csv");
  write_index_jumps_csv(os, s);
  out << "cells=" << s.cells.size() << " jumps=" << s.jumps.size() << "\n";
  return kExitOk;
}

}  // namespace fracscape

#pragma once

// INI run configuration shared by the command-line tools.
//
//   [grid]      dim, N
//   [model]     order, kappa      number | "a+b*sin(2*pi*x)" | "a+b*cos(2*pi*x)"
//                                 | "a+b*cos(2*pi*x)*cos(2*pi*y)" | CSV path
//   [fast]      S, m              explicit truncation, or certified for N^-m
//   [saddle]    k, tau, sigma, l, residTol, directionTol, maxIters, maxIndex,
//               seed, perturbMode, perturbAmplitude, stiffnessCap
//   [landscape] epsilon, branchBudget, nodeBudget, symmetries, targets,
//               recurse, dedupTol, polishTol, jitter
//   [output]    directory, logStride
//   [seed]      rngSeed
//   [op]        input, method
//   [bench]     N, S, repeats, timeout
//   [index_map] alphaMin, alphaMax, alphaSteps, kappaMin, kappaMax, kappaSteps
//
// Every range is checked at parse time; violations raise ConfigError.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fracscape/landscape.hpp"
#include "fracscape/phase_field.hpp"
#include "fracscape/saddle_dynamics.hpp"

namespace fracscape {

struct RunConfig {
  /// Relative CSV paths are resolved against this directory.
  std::filesystem::path base_dir;

  int dim = 1;
  std::size_t n = 128;
  std::string order = "2";
  std::string kappa = "0.02";
  std::optional<std::size_t> fast_s;
  std::optional<int> fast_m;

  SaddleConfig saddle;
  /// Unset: derived from the seed state.
  std::optional<int> saddle_k;
  /// u0 | u1 | u-1 | CSV path.
  std::string saddle_seed = "u0";
  /// 1-based position in the softest-mode list; 0 disables the perturbation.
  int perturb_mode = 0;
  double perturb_amplitude = 0.0;

  LandscapeOptions landscape;
  /// Unset: default_symmetries of the model.
  std::optional<Symmetries> symmetries;

  std::filesystem::path output_dir = "out";
  long log_stride = 0;
  std::uint64_t rng_seed = 0;

  /// poly | sin | const | CSV path.
  std::string op_input = "poly";
  /// fast | direct | both.
  std::string op_method = "fast";

  std::vector<std::size_t> bench_n{4096, 8192, 16384, 32768};
  std::vector<std::size_t> bench_s{30};
  int bench_repeats = 5;
  double bench_timeout = 600.0;

  double alpha_min = 1.0;
  double alpha_max = 2.0;
  int alpha_steps = 21;
  double kappa_min = 0.005;
  double kappa_max = 0.03;
  int kappa_steps = 6;
};

RunConfig parse_config(std::istream& is, const std::filesystem::path& base_dir = {});
/// Throws IoError if the file cannot be read, ConfigError if it is invalid.
RunConfig load_config(const std::filesystem::path& path);

/// Number parsed from the whole string, if it is one.
std::optional<double> parse_number(const std::string& text);
/// Constant, one of the supported expressions, or a field CSV on `grid`.
RealField parse_profile(const std::string& text, const GridSpec& grid, const std::filesystem::path& base_dir);

GridSpec make_grid(const RunConfig& c);
OrderSpec make_order(const RunConfig& c, const GridSpec& grid);
KappaSpec make_kappa(const RunConfig& c, const GridSpec& grid);
/// [fast] S if given, else the certified order for N^-m if m is given, else
/// kDefaultExpansionOrder.
std::size_t expansion_order(const RunConfig& c, const GridSpec& grid);
/// Attaches an expansion plan when the order is variable.
ModelParams make_model(const RunConfig& c);
/// Landscape options with symmetries resolved and the seed applied.
LandscapeOptions landscape_options(const RunConfig& c, const ModelParams& p);

}  // namespace fracscape

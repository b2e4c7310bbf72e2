// fracscape: operator evaluation, benchmarks, saddle runs, landscapes and
// index maps driven by an INI config. See README.md for the config keys.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fracscape/commands.hpp"
#include "fracscape/errors.hpp"

namespace fs = fracscape;

int main(int argc, char** argv) {
  CLI::App app{"Fractional phase-field operators and solution landscapes"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  int threads = 1;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "INI config file");
  app.add_option("--out", out_dir, "output directory (overrides [output] directory)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "rng seed (overrides [seed] rngSeed)");

  auto* op = app.add_subcommand("op-eval", "apply the fractional operator to a field");
  std::optional<std::string> input, method;
  op->add_option("--input", input, "poly | sin | const | field CSV");
  op->add_option("--method", method, "fast | direct | both");

  auto* bench = app.add_subcommand("bench", "time direct and fast evaluation");
  std::vector<std::size_t> n_list, s_list;
  std::optional<int> repeats;
  std::optional<double> timeout;
  bench->add_option("--n-list", n_list, "grid sizes")->delimiter(',');
  bench->add_option("--s-list", s_list, "truncation orders")->delimiter(',');
  bench->add_option("--repeats", repeats, "timed repeats per cell");
  bench->add_option("--timeout", timeout, "seconds per direct cell");

  auto* saddle = app.add_subcommand("saddle", "run saddle dynamics from a seed");
  std::optional<std::string> seed_field;
  std::optional<int> k, perturb_mode;
  std::optional<double> perturb_amplitude;
  saddle->add_option("--seed-field", seed_field, "u0 | u1 | u-1 | field CSV");
  saddle->add_option("--k", k, "target index (default: index of the seed)");
  saddle->add_option("--perturb-mode", perturb_mode, "1-based softest mode added to the seed");
  saddle->add_option("--perturb-amplitude", perturb_amplitude, "amplitude of that mode");

  auto* landscape = app.add_subcommand("landscape", "build the solution landscape below u0");
  auto* index_map = app.add_subcommand("index-map", "index of u0 over (kappa, alpha)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fs::kExitConfig;
  }

  try {
    fs::RunConfig c;
    if (!config_path.empty()) {
      c = fs::load_config(config_path);
    } else {
      std::istringstream empty;
      c = fs::parse_config(empty);
    }
    if (!out_dir.empty()) c.output_dir = out_dir;
    if (seed) c.rng_seed = *seed;
    if (input) c.op_input = std::filesystem::absolute(*input).string();
    if (input && (*input == "poly" || *input == "sin" || *input == "const")) c.op_input = *input;
    if (method) {
      if (*method != "fast" && *method != "direct" && *method != "both") {
        throw fs::ConfigError("--method must be fast, direct or both");
      }
      c.op_method = *method;
    }
    if (!n_list.empty()) c.bench_n = n_list;
    if (!s_list.empty()) c.bench_s = s_list;
    if (repeats) {
      if (*repeats < 1) throw fs::ConfigError("--repeats must be >= 1");
      c.bench_repeats = *repeats;
    }
    if (timeout) {
      if (!(*timeout > 0.0)) throw fs::ConfigError("--timeout must be positive");
      c.bench_timeout = *timeout;
    }
    if (seed_field) {
      const bool builtin = *seed_field == "u0" || *seed_field == "u1" || *seed_field == "u-1";
      c.saddle_seed = builtin ? *seed_field : std::filesystem::absolute(*seed_field).string();
    }
    if (k) c.saddle_k = *k;
    if (perturb_mode) c.perturb_mode = *perturb_mode;
    if (perturb_amplitude) c.perturb_amplitude = *perturb_amplitude;

    if (*op) return fs::cmd_op_eval(c, std::cout);
    if (*bench) return fs::cmd_bench(c, threads, std::cout);
    if (*saddle) return fs::cmd_saddle(c, std::cout);
    if (*landscape) return fs::cmd_landscape(c, threads, std::cout);
    if (*index_map) return fs::cmd_index_map(c, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fs::exit_code_for(e);
  }
  return fs::kExitConfig;
}

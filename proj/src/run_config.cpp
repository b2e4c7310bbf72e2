#include "fracscape/run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#include "fracscape/errors.hpp"
#include "fracscape/field_io.hpp"

namespace fracscape {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"grid", {"dim", "N"}},
      {"model", {"order", "kappa"}},
      {"fast", {"S", "m"}},
      {"saddle",
       {"k", "tau", "sigma", "l", "residTol", "directionTol", "maxIters", "maxIndex", "seed", "perturbMode",
        "perturbAmplitude", "stiffnessCap"}},
      {"landscape",
       {"epsilon", "branchBudget", "nodeBudget", "symmetries", "targets", "recurse", "dedupTol", "polishTol",
        "jitter"}},
      {"output", {"directory", "logStride"}},
      {"seed", {"rngSeed"}},
      {"op", {"input", "method"}},
      {"bench", {"N", "S", "repeats", "timeout"}},
      {"index_map", {"alphaMin", "alphaMax", "alphaSteps", "kappaMin", "kappaMax", "kappaSteps"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\"");
  return s.substr(b, e - b + 1);
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> text(const std::string& section, const std::string& key) const {
    auto v = tree_.get_optional<std::string>(section + "." + key);
    if (!v) return std::nullopt;
    return trim(*v);
  }

  std::optional<double> real(const std::string& section, const std::string& key) const {
    auto t = text(section, key);
    if (!t) return std::nullopt;
    auto v = parse_number(*t);
    if (!v) fail(section, key, *t, "a number");
    return v;
  }

  template <class Int>
  std::optional<Int> integer(const std::string& section, const std::string& key) const {
    auto t = text(section, key);
    if (!t) return std::nullopt;
    Int v{};
    const auto* end = t->data() + t->size();
    auto [ptr, ec] = std::from_chars(t->data(), end, v);
    if (ec != std::errc() || ptr != end) fail(section, key, *t, "an integer");
    return v;
  }

  std::optional<bool> boolean(const std::string& section, const std::string& key) const {
    auto t = text(section, key);
    if (!t) return std::nullopt;
    if (*t == "true" || *t == "1" || *t == "yes" || *t == "on") return true;
    if (*t == "false" || *t == "0" || *t == "no" || *t == "off") return false;
    fail(section, key, *t, "a boolean");
  }

  template <class Int>
  std::optional<std::vector<Int>> list(const std::string& section, const std::string& key) const {
    auto t = text(section, key);
    if (!t) return std::nullopt;
    std::vector<Int> out;
    std::stringstream ss(*t);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      Int v{};
      const auto* end = item.data() + item.size();
      auto [ptr, ec] = std::from_chars(item.data(), end, v);
      if (item.empty() || ec != std::errc() || ptr != end) fail(section, key, *t, "a comma-separated integer list");
      out.push_back(v);
    }
    return out;
  }

  [[noreturn]] static void fail(const std::string& section, const std::string& key, const std::string& value,
                                const std::string& expected) {
    throw ConfigError("[" + section + "] " + key + " = '" + value + "' is not " + expected);
  }

 private:
  const pt::ptree& tree_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

Symmetries parse_symmetries(const std::string& s) {
  if (s == "none") return {false, false};
  if (s == "translation") return {true, false};
  if (s == "sign") return {false, true};
  if (s == "both") return {true, true};
  throw ConfigError("[landscape] symmetries must be auto, none, translation, sign or both, got '" + s + "'");
}

const char* const kNumber = R"(((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?))";

}  // namespace

std::optional<double> parse_number(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  double v = 0.0;
  const char* begin = t.data();
  if (*begin == '+') ++begin;
  const auto* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

RealField parse_profile(const std::string& text, const GridSpec& grid, const std::filesystem::path& base_dir) {
  std::string compact;
  for (char ch : text) {
    if (ch != ' ' && ch != '\t') compact += ch;
  }
  if (auto v = parse_number(compact)) {
    return RealField::sample(grid, [&](double) { return *v; });
  }
  static const std::regex expr(std::string("^([+-]?") + kNumber + R"()([+-])()" + kNumber +
                               R"()\*(sin\(2\*pi\*x\)|cos\(2\*pi\*x\)|cos\(2\*pi\*x\)\*cos\(2\*pi\*y\))$)");
  std::smatch m;
  if (std::regex_match(compact, m, expr)) {
    const double a = *parse_number(m[1].str());
    const double b = (m[3].str() == "-" ? -1.0 : 1.0) * *parse_number(m[4].str());
    const std::string fn = m[6].str();
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (fn == "sin(2*pi*x)") return RealField::sample(grid, [&](double x) { return a + b * std::sin(two_pi * x); });
    if (fn == "cos(2*pi*x)") return RealField::sample(grid, [&](double x) { return a + b * std::cos(two_pi * x); });
    if (grid.dim() != 2) throw ConfigError("expression '" + text + "' needs a 2D grid");
    return RealField::sample(grid, [&](double x, double y) {
      return a + b * std::cos(two_pi * x) * std::cos(two_pi * y);
    });
  }
  std::filesystem::path path(trim(text));
  if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
  if (!std::filesystem::exists(path)) {
    throw ConfigError("'" + text + "' is neither a number, a supported expression, nor an existing CSV file");
  }
  RealField f = read_field_csv(path);
  if (!(f.grid() == grid)) throw ConfigError("field " + path.string() + " does not match the configured grid");
  return f;
}

RunConfig parse_config(std::istream& is, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError("unknown config section [" + section + "]");
    for (const auto& [key, value] : body) {
      (void)value;
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
    }
  }

  const Reader r(tree);
  RunConfig c;
  c.base_dir = base_dir;
  if (auto v = r.integer<int>("grid", "dim")) c.dim = *v;
  if (auto v = r.integer<std::size_t>("grid", "N")) c.n = *v;
  if (auto v = r.text("model", "order")) c.order = *v;
  if (auto v = r.text("model", "kappa")) c.kappa = *v;
  c.fast_s = r.integer<std::size_t>("fast", "S");
  c.fast_m = r.integer<int>("fast", "m");

  c.saddle_k = r.integer<int>("saddle", "k");
  if (auto v = r.real("saddle", "tau")) c.saddle.tau = *v;
  if (auto v = r.real("saddle", "sigma")) c.saddle.sigma = *v;
  if (auto v = r.real("saddle", "l")) c.saddle.dimer.length = *v;
  if (auto v = r.real("saddle", "residTol")) c.saddle.resid_tol = *v;
  if (auto v = r.real("saddle", "directionTol")) c.saddle.direction_tol = *v;
  if (auto v = r.integer<long>("saddle", "maxIters")) c.saddle.max_iters = *v;
  if (auto v = r.integer<int>("saddle", "maxIndex")) c.saddle.max_index = *v;
  if (auto v = r.boolean("saddle", "stiffnessCap")) c.saddle.stiffness_cap = *v;
  if (auto v = r.text("saddle", "seed")) c.saddle_seed = *v;
  if (auto v = r.integer<int>("saddle", "perturbMode")) c.perturb_mode = *v;
  if (auto v = r.real("saddle", "perturbAmplitude")) c.perturb_amplitude = *v;

  if (auto v = r.real("landscape", "epsilon")) c.landscape.epsilon = *v;
  if (auto v = r.integer<int>("landscape", "branchBudget")) c.landscape.branch_budget = *v;
  if (auto v = r.integer<int>("landscape", "nodeBudget")) c.landscape.node_budget = *v;
  if (auto v = r.text("landscape", "symmetries"); v && *v != "auto") c.symmetries = parse_symmetries(*v);
  if (auto v = r.list<int>("landscape", "targets")) c.landscape.targets = *v;
  if (auto v = r.boolean("landscape", "recurse")) c.landscape.recurse = *v;
  if (auto v = r.real("landscape", "dedupTol")) c.landscape.dedup_tol = *v;
  if (auto v = r.real("landscape", "polishTol")) c.landscape.polish_tol = *v;
  if (auto v = r.real("landscape", "jitter")) c.landscape.jitter = *v;

  if (auto v = r.text("output", "directory")) c.output_dir = *v;
  if (auto v = r.integer<long>("output", "logStride")) c.log_stride = *v;
  if (auto v = r.integer<std::uint64_t>("seed", "rngSeed")) c.rng_seed = *v;

  if (auto v = r.text("op", "input")) c.op_input = *v;
  if (auto v = r.text("op", "method")) c.op_method = *v;

  if (auto v = r.list<std::size_t>("bench", "N")) c.bench_n = *v;
  if (auto v = r.list<std::size_t>("bench", "S")) c.bench_s = *v;
  if (auto v = r.integer<int>("bench", "repeats")) c.bench_repeats = *v;
  if (auto v = r.real("bench", "timeout")) c.bench_timeout = *v;

  if (auto v = r.real("index_map", "alphaMin")) c.alpha_min = *v;
  if (auto v = r.real("index_map", "alphaMax")) c.alpha_max = *v;
  if (auto v = r.integer<int>("index_map", "alphaSteps")) c.alpha_steps = *v;
  if (auto v = r.real("index_map", "kappaMin")) c.kappa_min = *v;
  if (auto v = r.real("index_map", "kappaMax")) c.kappa_max = *v;
  if (auto v = r.integer<int>("index_map", "kappaSteps")) c.kappa_steps = *v;

  // Range checks owned by the library modules.
  make_model(c);
  c.saddle.k = c.saddle_k.value_or(0);
  c.saddle.validate();
  if (c.fast_m) require(*c.fast_m >= 1 && *c.fast_m <= 16, "[fast] m must be in [1, 16]");
  require(c.perturb_mode >= 0, "[saddle] perturbMode must be >= 0");
  require(!c.saddle_seed.empty(), "[saddle] seed must be u0, u1, u-1 or a CSV path");
  require(c.landscape.epsilon > 0.0, "[landscape] epsilon must be positive");
  require(c.landscape.branch_budget >= 1 && c.landscape.node_budget >= 1, "[landscape] budgets must be >= 1");
  require(c.landscape.dedup_tol > 0.0 && c.landscape.polish_tol > 0.0, "[landscape] tolerances must be positive");
  require(c.landscape.jitter >= 0.0, "[landscape] jitter must be >= 0");
  for (int m : c.landscape.targets) require(m >= 0, "[landscape] targets must be >= 0");
  require(c.log_stride >= 0, "[output] logStride must be >= 0");
  require(c.op_method == "fast" || c.op_method == "direct" || c.op_method == "both",
          "[op] method must be fast, direct or both");
  require(!c.bench_n.empty() && !c.bench_s.empty(), "[bench] N and S lists must be non-empty");
  for (std::size_t n : c.bench_n) require(n >= 4 && n % 2 == 0, "[bench] N entries must be even and >= 4");
  require(c.bench_repeats >= 1, "[bench] repeats must be >= 1");
  require(c.bench_timeout > 0.0, "[bench] timeout must be positive");
  require(c.alpha_min > 0.0 && c.alpha_max <= 2.0 && c.alpha_min <= c.alpha_max,
          "[index_map] need 0 < alphaMin <= alphaMax <= 2");
  require(c.kappa_min > 0.0 && c.kappa_min <= c.kappa_max, "[index_map] need 0 < kappaMin <= kappaMax");
  require(c.alpha_steps >= 1 && c.kappa_steps >= 1, "[index_map] step counts must be >= 1");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config " + path.string());
  return parse_config(is, path.parent_path());
}

GridSpec make_grid(const RunConfig& c) {
  try {
    return GridSpec(c.dim, c.n);
  } catch (const ContractError& e) {
    throw ConfigError(std::string("[grid] ") + e.what());
  }
}

OrderSpec make_order(const RunConfig& c, const GridSpec& grid) {
  try {
    if (auto v = parse_number(c.order)) return OrderSpec::constant(*v);
    return OrderSpec::variable(parse_profile(c.order, grid, c.base_dir));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("[model] order: ") + e.what());
  }
}

KappaSpec make_kappa(const RunConfig& c, const GridSpec& grid) {
  try {
    if (auto v = parse_number(c.kappa)) return KappaSpec::constant(*v);
    return KappaSpec::variable(parse_profile(c.kappa, grid, c.base_dir));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("[model] kappa: ") + e.what());
  }
}

std::size_t expansion_order(const RunConfig& c, const GridSpec& grid) {
  if (c.fast_s) return *c.fast_s;
  if (c.fast_m) return select_expansion_order(*c.fast_m, grid);
  return kDefaultExpansionOrder;
}

ModelParams make_model(const RunConfig& c) {
  const GridSpec grid = make_grid(c);
  OrderSpec order = make_order(c, grid);
  KappaSpec kappa = make_kappa(c, grid);
  std::optional<ExpansionPlan> plan;
  if (!order.is_constant()) plan = build_expansion(grid, expansion_order(c, grid));
  return ModelParams(grid, std::move(order), std::move(kappa), std::move(plan));
}

LandscapeOptions landscape_options(const RunConfig& c, const ModelParams& p) {
  LandscapeOptions o = c.landscape;
  o.symmetries = c.symmetries.value_or(default_symmetries(p));
  o.seed = c.rng_seed;
  return o;
}

}  // namespace fracscape

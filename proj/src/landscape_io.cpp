#include "fracscape/landscape_io.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <system_error>

#include "fracscape/errors.hpp"
#include "fracscape/field_io.hpp"
#include "json.hpp"

namespace fracscape {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  return os;
}

}  // namespace

std::string graph_json(const LandscapeGraph& g) {
  using nlohmann::json;
  json nodes = json::array();
  for (const auto& n : g.nodes) {
    const std::size_t keep = std::min(n.eigenvalues.size(), static_cast<std::size_t>(n.index) + kReportedStableEigenvalues);
    json prov = json::array();
    for (const auto& p : n.provenance) {
      prov.push_back({{"parent", p.parent}, {"mode", to_string(p.mode)}, {"target", p.target},
                      {"direction", p.direction}, {"sign", p.sign}, {"epsilon", p.epsilon}});
    }
    nodes.push_back({{"id", n.id},
                     {"index", n.index},
                     {"degenerate", n.degenerate},
                     {"residual", n.residual},
                     {"eigenvalues", std::vector<double>(n.eigenvalues.begin(), n.eigenvalues.begin() + static_cast<long>(keep))},
                     {"field_ref", "fields/" + n.id + ".csv"},
                     {"provenance", prov}});
  }
  json edges = json::array();
  for (const auto& e : g.edges) {
    edges.push_back({{"from", e.from}, {"to", e.to}, {"mode", to_string(e.mode)}, {"target", e.target},
                     {"direction", e.direction}, {"sign", e.sign}, {"epsilon", e.epsilon}});
  }
  json rejections = json::array();
  for (const auto& r : g.rejections) {
    rejections.push_back({{"parent", r.parent}, {"mode", to_string(r.mode)}, {"target", r.target},
                          {"direction", r.direction}, {"sign", r.sign}, {"reason", r.reason},
                          {"residual", r.residual}});
  }
  const json doc = {{"nodes", nodes},       {"edges", edges},          {"rejections", rejections},
                    {"partial", g.partial}, {"warnings", g.warnings}};
  return doc.dump(2) + "\n";
}

void write_summary_csv(std::ostream& os, const LandscapeGraph& g) {
  os << "index,classes\n";
  for (const auto& [index, count] : g.classes_by_index()) os << index << ',' << count << "\n";
}

void write_landscape(const std::filesystem::path& dir, const LandscapeGraph& g) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "fields", ec);
  if (ec) throw IoError("cannot create " + (dir / "fields").string() + ": " + ec.message());
  {
    auto os = open_out(dir / "graph.json");
    os << graph_json(g);
  }
  for (const auto& n : g.nodes) write_field_csv(dir / "fields" / (n.id + ".csv"), n.u);
  auto os = open_out(dir / "summary.csv");
  write_summary_csv(os, g);
}

void write_index_map_csv(std::ostream& os, const IndexSweep& s) {
  os << "kappa,alpha,index\n" << std::setprecision(17);
  for (const auto& c : s.cells) os << c.kappa << ',' << c.alpha << ',' << c.index << "\n";
}

void write_index_jumps_csv(std::ostream& os, const IndexSweep& s) {
  os << "kappa,wave_norm2,alpha_star\n" << std::setprecision(17);
  for (const auto& j : s.jumps) os << j.kappa << ',' << j.wave_norm2 << ',' << j.alpha_star << "\n";
}

}  // namespace fracscape

#pragma once

// On-disk form of landscape graphs and index sweeps.
//
//   graph.json    {nodes:[{id,index,residual,eigenvalues,field_ref,...}],
//                  edges:[{from,to,direction,sign,epsilon,...}], ...}
//   fields/<id>.csv  one field CSV per node
//   summary.csv   index,classes

#include <filesystem>
#include <iosfwd>
#include <string>

#include "fracscape/landscape.hpp"

namespace fracscape {

/// Leading eigenvalues kept per node in graph.json beyond the index.
inline constexpr std::size_t kReportedStableEigenvalues = 8;

std::string graph_json(const LandscapeGraph& g);
void write_summary_csv(std::ostream& os, const LandscapeGraph& g);

/// Writes graph.json, fields/<id>.csv and summary.csv under `dir` (created if
/// missing). Throws IoError.
void write_landscape(const std::filesystem::path& dir, const LandscapeGraph& g);

/// kappa,alpha,index rows.
void write_index_map_csv(std::ostream& os, const IndexSweep& s);
/// kappa,wave_norm2,alpha_star rows.
void write_index_jumps_csv(std::ostream& os, const IndexSweep& s);

}  // namespace fracscape

#pragma once

// Command implementations behind the fracscape executable. Each writes its
// data files under the configured output directory, prints a short human
// summary to `out`, and returns the process exit code.

#include <exception>
#include <iosfwd>

#include "fracscape/run_config.hpp"

namespace fracscape {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitNotConverged = 4;

/// op_eval.csv (and op_eval_direct.csv for method "both").
int cmd_op_eval(const RunConfig& c, std::ostream& out);
/// bench.csv.
int cmd_bench(const RunConfig& c, int threads, std::ostream& out);
/// saddle_field.csv, saddle_report.json, saddle_trajectory.csv (logStride > 0).
int cmd_saddle(const RunConfig& c, std::ostream& out);
/// graph.json, fields/, summary.csv, metadata.json.
int cmd_landscape(const RunConfig& c, int threads, std::ostream& out);
/// index_map.csv, index_jumps.csv.
int cmd_index_map(const RunConfig& c, std::ostream& out);

/// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& e);

}  // namespace fracscape

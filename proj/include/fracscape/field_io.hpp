#pragma once

// CSV serialization of real fields.
//
//   # grid dim=<d> N=<N>
//   one value per line (1D) | N rows of N comma-separated values (2D)
//
// Values are written with 17 significant digits, which round-trips doubles
// exactly.

#include <filesystem>
#include <iosfwd>

#include "fracscape/spectral_grid.hpp"

namespace fracscape {

void write_field_csv(std::ostream& os, const RealField& u);
void write_field_csv(const std::filesystem::path& path, const RealField& u);

/// Throws IoError on unreadable files or malformed content.
RealField read_field_csv(std::istream& is);
RealField read_field_csv(const std::filesystem::path& path);

}  // namespace fracscape

#include "fracscape/field_io.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "fracscape/errors.hpp"

namespace fracscape {

void write_field_csv(std::ostream& os, const RealField& u) {
  const GridSpec& g = u.grid();
  os << "# grid dim=" << g.dim() << " N=" << g.n() << "\n";
  os << std::setprecision(17);
  if (g.dim() == 1) {
    for (double v : u.values()) os << v << "\n";
    return;
  }
  for (std::size_t i = 0; i < g.n(); ++i) {
    for (std::size_t j = 0; j < g.n(); ++j) {
      if (j) os << ',';
      os << u[i * g.n() + j];
    }
    os << "\n";
  }
}

void write_field_csv(const std::filesystem::path& path, const RealField& u) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_field_csv(os, u);
  if (!os) throw IoError("write failed for " + path.string());
}

RealField read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty field file");
  int dim = 0;
  std::size_t n = 0;
  {
    std::istringstream hs(line);
    std::string hash, tag, d, nn;
    hs >> hash >> tag >> d >> nn;
    if (hash != "#" || tag != "grid" || d.rfind("dim=", 0) != 0 || nn.rfind("N=", 0) != 0) {
      throw IoError("missing '# grid dim=<d> N=<N>' header");
    }
    dim = std::atoi(d.c_str() + 4);
    n = static_cast<std::size_t>(std::strtoull(nn.c_str() + 2, nullptr, 10));
  }
  GridSpec grid = [&] {
    try {
      return GridSpec(dim, n);
    } catch (const ContractError& e) {
      throw IoError(std::string("bad grid header: ") + e.what());
    }
  }();

  std::vector<double> values;
  values.reserve(grid.size());
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::size_t count = 0;
    const char* p = line.c_str();
    while (*p) {
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p) throw IoError("malformed number on data row " + std::to_string(row));
      values.push_back(v);
      ++count;
      p = end;
      while (*p == ' ' || *p == '\r') ++p;
      if (*p == ',') ++p;
    }
    const std::size_t expect = dim == 1 ? 1 : n;
    if (count != expect) {
      throw IoError("data row " + std::to_string(row) + " has " + std::to_string(count) + " values, expected " +
                    std::to_string(expect));
    }
    ++row;
  }
  try {
    return RealField(grid, std::move(values));
  } catch (const ContractError& e) {
    throw IoError(std::string("bad field data: ") + e.what());
  }
}

RealField read_field_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  return read_field_csv(is);
}

}  // namespace fracscape

// snapshot.hpp -- binary field snapshots and CSV exports.
//
// Snapshot layout (native little-endian doubles):
//   8 bytes       magic "PFLSNAP1"
//   int32         dim
//   int32[3]      cells
//   float64[3]    extent
//   float64       time
//   float64       eps
//   int32         field count
//   per field:    int32 name length, name bytes, float64[size] values
#pragma once

#include "pfl/grid.hpp"
#include "pfl/interface.hpp"

#include <string>
#include <utility>
#include <vector>

namespace pfl {

struct Snapshot {
  Grid grid;
  double time = 0.0;
  double eps = 0.0;
  std::vector<std::pair<std::string, Array>> fields;

  const Array* field(const std::string& name) const {
    for (const auto& [n, a] : fields)
      if (n == name) return &a;
    return nullptr;
  }
};

void write_snapshot(const std::string& path, const Snapshot& s);
Snapshot read_snapshot(const std::string& path);

// Plot-ready exports: cell centers and values, one row per cell / vertex.
void write_field_csv(const std::string& path, const ScalarField& f,
                     const std::string& name = "u");
void write_interface_csv(const std::string& path, const InterfaceSet& s);

}  // namespace pfl

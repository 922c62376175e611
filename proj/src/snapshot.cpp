#include "pfl/snapshot.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace pfl {
namespace {

constexpr char kMagic[8] = {'P', 'F', 'L', 'S', 'N', 'A', 'P', '1'};

template <class T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("snapshot: truncated file");
  return v;
}

}  // namespace

void write_snapshot(const std::string& path, const Snapshot& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("snapshot: cannot open " + path + " for writing");
  os.write(kMagic, sizeof(kMagic));
  put<std::int32_t>(os, s.grid.dim());
  for (int d = 0; d < 3; ++d) put<std::int32_t>(os, s.grid.cells()[d]);
  for (int d = 0; d < 3; ++d) put<double>(os, s.grid.extent()[d]);
  put<double>(os, s.time);
  put<double>(os, s.eps);
  put<std::int32_t>(os, static_cast<std::int32_t>(s.fields.size()));
  for (const auto& [name, a] : s.fields) {
    if (a.size() != s.grid.size())
      throw std::runtime_error("snapshot: field '" + name + "' has wrong size");
    put<std::int32_t>(os, static_cast<std::int32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    os.write(reinterpret_cast<const char*>(a.data()),
             static_cast<std::streamsize>(sizeof(double) * a.size()));
  }
  if (!os) throw std::runtime_error("snapshot: write failed for " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("snapshot: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("snapshot: bad magic in " + path);
  const int dim = get<std::int32_t>(is);
  std::array<int, 3> cells{};
  for (int d = 0; d < 3; ++d) cells[d] = get<std::int32_t>(is);
  std::array<double, 3> extent{};
  for (int d = 0; d < 3; ++d) extent[d] = get<double>(is);
  Snapshot s;
  s.grid = Grid(dim, cells, extent);
  s.time = get<double>(is);
  s.eps = get<double>(is);
  const int nf = get<std::int32_t>(is);
  if (nf < 0 || nf > 64) throw std::runtime_error("snapshot: implausible field count");
  for (int f = 0; f < nf; ++f) {
    const int len = get<std::int32_t>(is);
    if (len < 0 || len > 4096) throw std::runtime_error("snapshot: implausible name length");
    std::string name(static_cast<std::size_t>(len), '\0');
    is.read(name.data(), len);
    Array a(s.grid.size());
    is.read(reinterpret_cast<char*>(a.data()),
            static_cast<std::streamsize>(sizeof(double) * a.size()));
    if (!is) throw std::runtime_error("snapshot: truncated field data in " + path);
    s.fields.emplace_back(std::move(name), std::move(a));
  }
  return s;
}

void write_field_csv(const std::string& path, const ScalarField& f,
                     const std::string& name) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("csv: cannot open " + path);
  os.precision(17);
  const Grid& g = f.grid;
  const char* hdr[3] = {"x", "y", "z"};
  for (int d = 0; d < g.dim(); ++d) os << hdr[d] << ",";
  os << name << "\n";
  double x[3];
  for (std::int64_t c = 0; c < g.size(); ++c) {
    g.cell_center(c, x);
    for (int d = 0; d < g.dim(); ++d) os << x[d] << ",";
    os << f.a[c] << "\n";
  }
}

void write_interface_csv(const std::string& path, const InterfaceSet& s) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("csv: cannot open " + path);
  os.precision(17);
  if (s.dim == 2) {
    os << "line,closed,x,y\n";
    for (std::size_t l = 0; l < s.lines.size(); ++l)
      for (const auto& p : s.lines[l].pts)
        os << l << "," << (s.lines[l].closed ? 1 : 0) << "," << p[0] << "," << p[1] << "\n";
    return;
  }
  os << "x,y,z\n";
  for (const auto& p : s.points) os << p[0] << "," << p[1] << "," << p[2] << "\n";
}

}  // namespace pfl

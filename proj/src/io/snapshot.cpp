#include "shsplit/io/snapshot.hpp"

#include <array>
#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace shsplit::io {
namespace {

template <typename T>
void put(std::ostream& os, T v) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(bytes.data(), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  std::array<char, sizeof(T)> bytes;
  if (!is.read(bytes.data(), sizeof(T))) throw snapshot_error("snapshot: truncated input");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T v;
  std::memcpy(&v, bytes.data(), sizeof(T));
  return v;
}

}  // namespace

void write_snapshot(std::ostream& os, const FieldD& u, const PhysParams& p, double t) {
  const GridSpec& g = u.grid();
  os.write("SH3D", 4);
  put<std::uint32_t>(os, kSnapshotVersion);
  for (int n : {g.nx(), g.ny(), g.nz()}) put<std::uint32_t>(os, static_cast<std::uint32_t>(n));
  for (double v : {g.dx(), g.dy(), g.dz(), p.epsilon, p.eta, t}) put<double>(os, v);
  for (std::size_t n = 0; n < u.size(); ++n) put<double>(os, u[n]);
  if (!os) throw std::ios_base::failure("snapshot: write failed");
}

Snapshot read_snapshot(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "SH3D", 4) != 0) throw snapshot_error("snapshot: bad magic");
  const auto version = get<std::uint32_t>(is);
  if (version != kSnapshotVersion) throw snapshot_error("snapshot: unsupported version " + std::to_string(version));
  std::array<int, 3> n{};
  for (int& v : n) v = static_cast<int>(get<std::uint32_t>(is));
  std::array<double, 6> d{};
  for (double& v : d) v = get<double>(is);
  Snapshot s;
  const GridSpec g = GridSpec::from_spacings(n[0], n[1], n[2], d[0], d[1], d[2]);
  s.field = FieldD(g);
  s.params = {d[3], d[4]};
  s.t = d[5];
  for (std::size_t i = 0; i < s.field.size(); ++i) s.field[i] = get<double>(is);
  return s;
}

void write_snapshot_file(const std::string& path, const FieldD& u, const PhysParams& p, double t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::ios_base::failure("cannot open '" + path + "' for writing");
  write_snapshot(os, u, p, t);
}

Snapshot read_snapshot_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::ios_base::failure("cannot open '" + path + "'");
  return read_snapshot(is);
}

void write_vtk(std::ostream& os, const FieldD& u, const std::string& name) {
  const GridSpec& g = u.grid();
  os << "# vtk DataFile Version 3.0\n"
     << name << "\nASCII\nDATASET STRUCTURED_POINTS\n"
     << "DIMENSIONS " << g.nx() + 1 << ' ' << g.ny() + 1 << ' ' << g.nz() + 1 << '\n'
     << "ORIGIN 0 0 0\n";
  os.precision(17);
  os << "SPACING " << g.dx() << ' ' << g.dy() << ' ' << g.dz() << '\n'
     << "POINT_DATA " << u.size() << '\n'
     << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
  for (std::size_t n = 0; n < u.size(); ++n) os << u[n] << '\n';
  if (!os) throw std::ios_base::failure("vtk: write failed");
}

void write_vtk_file(const std::string& path, const FieldD& u, const std::string& name) {
  std::ofstream os(path);
  if (!os) throw std::ios_base::failure("cannot open '" + path + "' for writing");
  write_vtk(os, u, name);
}

}  // namespace shsplit::io

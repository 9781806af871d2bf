#pragma once

// Binary field snapshots. Layout, all little-endian:
//   "SH3D", u32 version, u32 nx ny nz, f64 dx dy dz epsilon eta t,
//   then (nx+1)(ny+1)(nz+1) f64 values with i fastest.

#include "shsplit/energy.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace shsplit::io {

inline constexpr std::uint32_t kSnapshotVersion = 1;

struct Snapshot {
  FieldD field;
  PhysParams params;
  double t = 0.0;
};

class snapshot_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_snapshot(std::ostream& os, const FieldD& u, const PhysParams& p, double t);
Snapshot read_snapshot(std::istream& is);
void write_snapshot_file(const std::string& path, const FieldD& u, const PhysParams& p, double t);
Snapshot read_snapshot_file(const std::string& path);

/// Legacy VTK STRUCTURED_POINTS text file with one scalar array named `name`.
void write_vtk(std::ostream& os, const FieldD& u, const std::string& name = "u");
void write_vtk_file(const std::string& path, const FieldD& u, const std::string& name = "u");

}  // namespace shsplit::io

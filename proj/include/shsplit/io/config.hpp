#pragma once

// Flat "section.key = value" run configuration. Blank lines and text after
// '#' are ignored.

#include "shsplit/sh_scheme.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace shsplit::io {

/// Validation failure; `line` is 0 for command-line overrides.
class config_error : public std::runtime_error {
 public:
  config_error(const std::string& source, int line, const std::string& msg);
  std::string source;
  int line;
};

struct RawEntry {
  std::string value;
  std::string source;
  int line = 0;
};

using RawConfig = std::map<std::string, RawEntry>;

RawConfig parse_config_text(const std::string& text, const std::string& source = "<config>");
RawConfig parse_config_file(const std::string& path);
/// Applies a "key=value" override.
void apply_override(RawConfig& raw, const std::string& assignment);

enum class IcKind { zero, constant, cosine_modes, filtered_noise };
enum class SnapshotFormat { raw, vtk };
enum class SobolevChoice { automatic, dense, probe, manual };

struct RunConfig {
  struct Grid {
    int nx = 16, ny = 16, nz = 16;
    double lx = 1.0, ly = 1.0, lz = 1.0;
  } grid;
  PhysParams params;
  struct Bounds {
    std::optional<double> zeta;
    std::optional<double> c_grid;
    SobolevChoice sobolev_mode = SobolevChoice::automatic;
  } bounds;
  struct Time {
    std::optional<double> dt;  ///< empty: min(dt_limit, dt_cap)
    double dt_cap = 0.01;
    std::size_t steps = 100;
    bool adaptive = false;
    double dt_lo = 1e-4;
    std::optional<double> dt_hi;  ///< empty: 0.9 dt_limit
    double target_residual = 1e-8;
    std::size_t max_steps = 100000;
  } time;
  CGConfig solver;
  struct Ic {
    IcKind kind = IcKind::filtered_noise;
    double value = 0.0;
    double amplitude = 0.5;
    std::vector<std::array<int, 3>> modes{{1, 1, 1}};
    std::uint64_t seed = 0;
  } ic;
  struct Output {
    std::string csv_path = "run.csv";
    std::size_t snapshot_every = 0;  ///< 0 disables snapshots
    std::string snapshot_dir = "snapshots";
    SnapshotFormat format = SnapshotFormat::raw;
  } output;
  bool monitors = true;

  GridSpec grid_spec() const;
};

/// Typed view of a raw config; throws config_error naming the offending line.
RunConfig to_run_config(const RawConfig& raw);

/// Sorted key=value listing of every resolved setting.
std::string canonical_string(const RunConfig& cfg);
/// FNV-1a 64-bit hash of canonical_string, as 16 hex digits.
std::string config_digest(const RunConfig& cfg);

/// Every key the parser accepts, sorted.
const std::vector<std::string>& known_keys();

std::string to_string(IcKind k);
std::string to_string(SnapshotFormat f);
std::string to_string(SobolevChoice s);

}  // namespace shsplit::io

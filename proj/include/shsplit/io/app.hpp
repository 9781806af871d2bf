#pragma once

// Orchestration behind the shsim subcommands, kept out of main() so tests can
// drive it directly.

#include "shsplit/io/config.hpp"
#include "shsplit/verify/convergence.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace shsplit::io {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitViolation = 2, kExitIo = 3 };

FieldD initial_condition(const RunConfig& cfg);
SchemeOptions scheme_options(const RunConfig& cfg);

struct RunOutcome {
  RunLog log;
  std::filesystem::path csv_path;
  std::vector<std::filesystem::path> snapshots;
  double dt = 0.0;  ///< fixed step actually used (0 for adaptive runs)
};

/// Builds the scheme, marches, writes the CSV and snapshots under `out_dir`.
/// Monitor violations propagate as monitor_violation after the CSV rows
/// written so far are flushed.
RunOutcome execute_run(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream* progress = nullptr);

struct ConstantsReport {
  double zeta = 0.0;
  double c_eps_eta_zeta = 0.0;
  double omega = 0.0;
  double sobolev_c = 0.0;
  std::string sobolev_mode;
  double m = 0.0;
  double sup_bound = 0.0;
  std::optional<double> dt_limit;
  double initial_energy = 0.0;
};

/// With `m_override` the step limit is evaluated at that M instead of the computed one.
ConstantsReport compute_constants(const RunConfig& cfg, std::optional<double> m_override = {});

/// Defaults used by `shsim convergence temporal` before any config is applied.
RawConfig temporal_defaults();
/// Defaults used by `shsim convergence spatial` before any config is applied.
RawConfig spatial_defaults();

verify::TemporalConfig temporal_study_config(const RunConfig& cfg, const std::vector<double>& dt_ladder,
                                             double reference_dt, double final_time);
verify::SpatialConfig spatial_study_config(const RunConfig& cfg, const std::vector<int>& levels, double final_time);

}  // namespace shsplit::io

#include "shsplit/io/app.hpp"

#include "shsplit/io/run_log_csv.hpp"
#include "shsplit/io/snapshot.hpp"
#include "shsplit/verify/random_fields.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>

namespace shsplit::io {

FieldD initial_condition(const RunConfig& cfg) {
  const GridSpec g = cfg.grid_spec();
  switch (cfg.ic.kind) {
    case IcKind::zero: return FieldD(g);
    case IcKind::constant: return FieldD(g, cfg.ic.value);
    case IcKind::cosine_modes: {
      // mean of the listed modes, so |U0| <= amplitude
      FieldD u(g);
      for (const auto& m : cfg.ic.modes) u += verify::cosine_mode(g, m[0], m[1], m[2], cfg.ic.amplitude);
      u *= 1.0 / static_cast<double>(cfg.ic.modes.size());
      return u;
    }
    case IcKind::filtered_noise: {
      verify::Rng rng(cfg.ic.seed);
      return verify::filtered_noise(g, rng, cfg.ic.amplitude);
    }
  }
  throw std::invalid_argument("unknown initial condition");
}

SchemeOptions scheme_options(const RunConfig& cfg) {
  SchemeOptions o;
  o.zeta = cfg.bounds.zeta;
  o.cg = cfg.solver;
  switch (cfg.bounds.sobolev_mode) {
    case SobolevChoice::automatic:
      if (cfg.bounds.c_grid) {
        o.sobolev.mode = SobolevMode::manual;
        o.sobolev.manual_value = *cfg.bounds.c_grid;
      } else {
        o.sobolev.mode = cfg.grid_spec().node_count() <= o.sobolev.dense_limit ? SobolevMode::dense : SobolevMode::probe;
      }
      break;
    case SobolevChoice::dense: o.sobolev.mode = SobolevMode::dense; break;
    case SobolevChoice::probe: o.sobolev.mode = SobolevMode::probe; break;
    case SobolevChoice::manual:
      o.sobolev.mode = SobolevMode::manual;
      o.sobolev.manual_value = cfg.bounds.c_grid.value_or(0.0);
      break;
  }
  return o;
}

namespace {

std::filesystem::path under(const std::filesystem::path& dir, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : dir / path;
}

}  // namespace

RunOutcome execute_run(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream* progress) {
  const FieldD u0 = initial_condition(cfg);
  const SHScheme scheme = SHScheme::initialize(u0, cfg.params, scheme_options(cfg));

  RunOutcome out;
  out.csv_path = under(out_dir, cfg.output.csv_path);
  if (out.csv_path.has_parent_path()) std::filesystem::create_directories(out.csv_path.parent_path());
  std::ofstream csv(out.csv_path);
  if (!csv) throw std::ios_base::failure("cannot open '" + out.csv_path.string() + "' for writing");
  write_run_csv_header(csv);

  const std::filesystem::path snap_dir = under(out_dir, cfg.output.snapshot_dir);
  if (cfg.output.snapshot_every > 0) std::filesystem::create_directories(snap_dir);

  RunOptions ro;
  ro.monitors = cfg.monitors;
  ro.on_step = [&](const RunRecord& r, const FieldD& u) {
    write_run_csv_row(csv, r);
    if (!csv) throw std::ios_base::failure("write to '" + out.csv_path.string() + "' failed");
    if (cfg.output.snapshot_every > 0 && r.n % cfg.output.snapshot_every == 0) {
      char name[32];
      const bool vtk = cfg.output.format == SnapshotFormat::vtk;
      std::snprintf(name, sizeof name, "snap_%06zu.%s", r.n, vtk ? "vtk" : "sh3d");
      const auto path = snap_dir / name;
      if (vtk) write_vtk_file(path.string(), u);
      else write_snapshot_file(path.string(), u, cfg.params, r.t);
      out.snapshots.push_back(path);
    }
    if (progress && r.n % 10 == 0) {
      *progress << "step " << r.n << " t=" << r.t << " H=" << r.energy.total_H << " linf=" << r.linf
                << " cg=" << r.cg_iters << '\n';
    }
  };

  const std::string digest = config_digest(cfg);
  if (cfg.time.adaptive) {
    if (!scheme.dt_limit() && !cfg.time.dt_hi)
      throw std::invalid_argument("time.dt_hi is required when the step size is unbounded");
    const double dt_hi = cfg.time.dt_hi.value_or(0.9 * scheme.dt_limit().value_or(0.0));
    AdaptiveOptions ao;
    ao.run = ro;
    out.log = adaptive_run(scheme, u0, cfg.time.dt_lo, dt_hi, cfg.time.target_residual, cfg.time.max_steps, ao);
  } else {
    double dt = cfg.time.dt ? *cfg.time.dt : std::min(scheme.dt_limit().value_or(cfg.time.dt_cap), cfg.time.dt_cap);
    out.dt = dt;
    out.log = run(scheme, u0, dt, cfg.time.steps, ro);
  }
  out.log.meta.seed = cfg.ic.seed;
  out.log.meta.config_digest = digest;
  return out;
}

ConstantsReport compute_constants(const RunConfig& cfg, std::optional<double> m_override) {
  const FieldD u0 = initial_condition(cfg);
  const SchemeOptions so = scheme_options(cfg);
  ConstantsReport r;
  r.zeta = so.zeta.value_or(default_zeta(cfg.params));
  const auto c = c_eps_eta_zeta(cfg.params, r.zeta);
  r.c_eps_eta_zeta = c.c;
  r.omega = c.omega;
  const auto sob = sobolev_constant(u0.grid(), so.sobolev);
  r.sobolev_c = sob.c;
  r.sobolev_mode = so.sobolev.mode == SobolevMode::dense ? "dense" : so.sobolev.mode == SobolevMode::probe ? "probe" : "manual";
  const auto mb = bound_M(u0, cfg.params, r.zeta, sob.c);
  r.m = m_override.value_or(mb.m);
  r.sup_bound = mb.sup_bound;
  r.dt_limit = sh_dt_limit(r.m, cfg.params.eta);
  r.initial_energy = energy_parts(u0, cfg.params).total_H;
  return r;
}

RawConfig temporal_defaults() {
  return parse_config_text(
      "grid.nx = 16\ngrid.ny = 16\ngrid.nz = 16\n"
      "grid.lx = 2\ngrid.ly = 2\ngrid.lz = 2\n"
      "params.epsilon = 1\nparams.eta = 0.5\n"
      "ic.kind = cosine_modes\nic.amplitude = 0.5\nic.modes = 1,0,0; 0,1,1; 1,1,1\n"
      "bounds.sobolev_mode = probe\n",
      "<temporal defaults>");
}

RawConfig spatial_defaults() {
  return parse_config_text(
      "grid.lx = 1\ngrid.ly = 1\ngrid.lz = 1\n"
      "params.epsilon = 1\nparams.eta = 0.5\n"
      "ic.amplitude = 0.5\nic.modes = 1,1,1\n"
      "time.dt = 1e-5\n",
      "<spatial defaults>");
}

verify::TemporalConfig temporal_study_config(const RunConfig& cfg, const std::vector<double>& dt_ladder,
                                             double reference_dt, double final_time) {
  verify::TemporalConfig t;
  t.u0 = initial_condition(cfg);
  t.params = cfg.params;
  t.final_time = final_time;
  t.dt_ladder = dt_ladder;
  t.reference_dt = reference_dt;
  t.scheme = scheme_options(cfg);
  t.monitors = cfg.monitors;
  return t;
}

verify::SpatialConfig spatial_study_config(const RunConfig& cfg, const std::vector<int>& levels, double final_time) {
  verify::SpatialConfig s;
  s.mms.params = cfg.params;
  s.mms.amplitude = cfg.ic.amplitude;
  s.mms.modes = cfg.ic.modes.front();
  for (int n : levels) s.grids.push_back(GridSpec::from_lengths(n, n, n, cfg.grid.lx, cfg.grid.ly, cfg.grid.lz));
  s.dt = cfg.time.dt.value_or(1e-5);
  s.final_time = final_time;
  s.cg = cfg.solver;
  return s;
}

}  // namespace shsplit::io

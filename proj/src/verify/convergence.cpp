#include "shsplit/verify/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace shsplit::verify {
namespace {

std::size_t steps_for(double T, double dt) {
  const double n = std::round(T / dt);
  if (n < 1.0 || std::abs(n * dt - T) > 1e-9 * T)
    throw std::invalid_argument("final time " + std::to_string(T) + " is not a multiple of dt " + std::to_string(dt));
  return static_cast<std::size_t>(n);
}

void fill_ratios(ConvergenceStudy& s) {
  for (std::size_t i = 1; i < s.levels.size(); ++i) {
    auto& cur = s.levels[i];
    const auto& prev = s.levels[i - 1];
    const double step_ratio = std::log(prev.step / cur.step);
    if (cur.error > 0.0 && prev.error > 0.0) {
      cur.ratio = prev.error / cur.error;
      cur.order = std::log(*cur.ratio) / step_ratio;
    }
    if (cur.defect && prev.defect && *cur.defect > 0.0 && *prev.defect > 0.0) {
      cur.defect_ratio = *prev.defect / *cur.defect;
      cur.defect_order = std::log(*cur.defect_ratio) / step_ratio;
    }
  }
}

double max_spacing(const GridSpec& g) { return std::max({g.dx(), g.dy(), g.dz()}); }

}  // namespace

std::vector<double> ConvergenceStudy::orders() const {
  std::vector<double> o;
  for (const auto& l : levels)
    if (l.order) o.push_back(*l.order);
  return o;
}

std::vector<double> ConvergenceStudy::defect_ratios() const {
  std::vector<double> o;
  for (const auto& l : levels)
    if (l.defect_ratio) o.push_back(*l.defect_ratio);
  return o;
}

void write_study_csv(std::ostream& os, const ConvergenceStudy& s) {
  auto opt = [&](const std::optional<double>& v) {
    if (v) os << *v;
  };
  os.precision(17);
  os << "level," << (s.mode == StudyMode::temporal ? "dt" : "h")
     << ",error,ratio,order,defect,defect_ratio,defect_order\n";
  for (std::size_t i = 0; i < s.levels.size(); ++i) {
    const auto& l = s.levels[i];
    os << i << ',' << l.step << ',' << l.error << ',';
    opt(l.ratio);
    os << ',';
    opt(l.order);
    os << ',';
    opt(l.defect);
    os << ',';
    opt(l.defect_ratio);
    os << ',';
    opt(l.defect_order);
    os << '\n';
  }
}

ConvergenceStudy temporal_convergence(const TemporalConfig& cfg) {
  if (cfg.dt_ladder.size() < 3) throw std::invalid_argument("temporal_convergence: need at least 3 ladder levels");
  const double dt_min = *std::min_element(cfg.dt_ladder.begin(), cfg.dt_ladder.end());
  if (!(cfg.reference_dt > 0.0) || cfg.reference_dt > dt_min / 20.0)
    throw std::invalid_argument("temporal_convergence: reference dt must be <= min(ladder)/20");
  const SHScheme scheme = SHScheme::initialize(cfg.u0, cfg.params, cfg.scheme);
  for (double dt : cfg.dt_ladder)
    if (!(dt > 0.0) || (scheme.dt_limit() && dt > *scheme.dt_limit()))
      throw std::invalid_argument("temporal_convergence: dt " + std::to_string(dt) + " is not admissible");

  RunOptions ro;
  ro.monitors = cfg.monitors;
  auto march = [&](double dt) {
    return run(scheme, cfg.u0, dt, steps_for(cfg.final_time, dt), ro).final_state;
  };
  const FieldD reference = march(cfg.reference_dt);
  ConvergenceStudy s;
  s.mode = StudyMode::temporal;
  for (double dt : cfg.dt_ladder) {
    ConvergenceLevel l;
    l.step = dt;
    l.error = l2_norm(march(dt) - reference);
    l.sobolev_constant = scheme.bounds().c_grid;
    s.levels.push_back(l);
  }
  fill_ratios(s);
  return s;
}

double MMSProblem::a(double t) const { return amplitude * std::cos(omega * t); }

double MMSProblem::a_dot(double t) const { return -amplitude * omega * std::sin(omega * t); }

double MMSProblem::wavenumber_sq(const GridSpec& g) const {
  constexpr double pi = std::numbers::pi;
  double k2 = 0.0;
  for (Axis ax : kAxes) {
    const double k = pi * modes[static_cast<int>(ax)] / g.length(ax);
    k2 += k * k;
  }
  return k2;
}

FieldD MMSProblem::shape(const GridSpec& g) const {
  constexpr double pi = std::numbers::pi;
  return FieldD::from_function(g, [&](int i, int j, int k) {
    return std::cos(pi * modes[0] * i * g.dx() / g.lx()) * std::cos(pi * modes[1] * j * g.dy() / g.ly()) *
           std::cos(pi * modes[2] * k * g.dz() / g.lz());
  });
}

FieldD MMSProblem::exact(const GridSpec& g, double t) const { return a(t) * shape(g); }

FieldD MMSProblem::source(const GridSpec& g, double t) const {
  const FieldD phi = shape(g);
  const double amp = a(t);
  const double k2 = wavenumber_sq(g);
  const double lin = (1.0 - params.eta) + params.epsilon * k2 * k2 - 2.0 * k2;
  FieldD s(g);
  const auto& x = phi.values();
  s.values() = (a_dot(t) + lin * amp) * x + (amp * amp * amp) * x.array().cube().matrix();
  return s;
}

FieldD MMSProblem::defect(const GridSpec& g, double t) const {
  const FieldD u = exact(g, t);
  const double k2 = wavenumber_sq(g);
  const FieldD lap = laplacian(extend(u));
  const FieldD bilap = laplacian(extend(lap));
  FieldD d(g);
  d.values() = params.epsilon * (bilap.values() - k2 * k2 * u.values()) + 2.0 * (lap.values() + k2 * u.values());
  return d;
}

ConvergenceStudy spatial_convergence(const SpatialConfig& cfg) {
  if (cfg.grids.size() < 3) throw std::invalid_argument("spatial_convergence: need at least 3 grids");
  const std::size_t n_steps = steps_for(cfg.final_time, cfg.dt);
  ConvergenceStudy s;
  s.mode = StudyMode::spatial;
  for (const GridSpec& g : cfg.grids) {
    // bounds are irrelevant here: monitors off and no step restriction
    const SHScheme scheme(g, cfg.mms.params, BoundParams{0.0, 1.0, 0.0}, std::numeric_limits<double>::infinity(),
                          cfg.cg);
    FieldD u = cfg.mms.exact(g, 0.0);
    double defect = 0.0;
    for (std::size_t n = 0; n < n_steps; ++n) {
      const double t_next = static_cast<double>(n + 1) * cfg.dt;
      const FieldD forcing = cfg.mms.source(g, t_next);
      u = sh_step(scheme, u, cfg.dt, {&forcing, false, false}).next;
      defect = std::max(defect, l2_norm(cfg.mms.defect(g, t_next)));
    }
    ConvergenceLevel l;
    l.step = max_spacing(g);
    l.error = l2_norm(u - cfg.mms.exact(g, cfg.final_time));
    l.defect = defect;
    s.levels.push_back(l);
  }
  fill_ratios(s);
  return s;
}

}  // namespace shsplit::verify

#include "shsplit/sh_scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace shsplit {

SHScheme::SHScheme(const GridSpec& grid, const PhysParams& params, const BoundParams& bounds, double sup_bound,
                   const CGConfig& cg)
    : grid_(grid),
      params_(params),
      bounds_(bounds),
      sup_bound_(sup_bound),
      branch_(branch_for(params.eta)),
      cg_(cg),
      dt_limit_(sh_dt_limit(bounds.m_trunc, params.eta)) {
  params_.validate();
  cg_.validate();
  if (!(bounds_.m_trunc >= 0.0)) throw std::invalid_argument("SHScheme: M must be >= 0");
}

SHScheme SHScheme::initialize(const FieldD& u0, const PhysParams& params, const SchemeOptions& opts) {
  params.validate();
  if (!u0.all_finite()) throw std::invalid_argument("SHScheme: initial state is not finite");
  const double zeta = opts.zeta.value_or(default_zeta(params));
  c_eps_eta_zeta(params, zeta);  // rejects inadmissible zeta
  const SobolevResult sob = sobolev_constant(u0.grid(), opts.sobolev);
  const MBound mb = bound_M(u0, params, zeta, sob.c);
  return SHScheme(u0.grid(), params, BoundParams{zeta, sob.c, mb.m}, mb.sup_bound, opts.cg);
}

LinearOperator<double> implicit_operator(const SHScheme& scheme, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("implicit_operator: dt must be positive");
  const double eps = scheme.params().epsilon;
  const double diag =
      1.0 / dt + (scheme.branch() == Branch::eta_below_one ? 1.0 - scheme.params().eta : 0.0);
  std::ostringstream label;
  label << "(" << diag << ") I + " << eps << " Lap^2";
  return {[diag, eps](const FieldD& x) {
            FieldD out = bilaplacian(extend(x));
            out.values() = diag * x.values() + eps * out.values();
            return out;
          },
          label.str()};
}

FieldD explicit_rhs(const SHScheme& scheme, const FieldD& u, double dt) {
  const FieldD lap = laplacian(extend(u));
  FieldD rhs(u.grid());
  const double extra = scheme.branch() == Branch::eta_at_least_one ? scheme.params().eta - 1.0 : 0.0;
  const auto& x = u.values();
  rhs.values() = x / dt - x.array().cube().matrix() + extra * x - 2.0 * lap.values();
  return rhs;
}

StepResult sh_step(const SHScheme& scheme, const FieldD& u, double dt, const StepOptions& opts) {
  require_same_grid(scheme.grid(), u.grid(), "sh_step");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("sh_step: dt must be positive");
  if (opts.enforce_dt_limit && scheme.dt_limit() && dt > *scheme.dt_limit())
    throw std::invalid_argument("sh_step: dt = " + std::to_string(dt) + " exceeds limit " +
                                std::to_string(*scheme.dt_limit()));
  FieldD rhs = explicit_rhs(scheme, u, dt);
  if (opts.forcing) rhs += *opts.forcing;
  const auto sol = cg_solve(implicit_operator(scheme, dt), rhs, scheme.cg(), &u);
  if (!sol.converged)
  {
    std::ostringstream os;
    os << "sh_step: CG did not converge in " << sol.iters << " iterations (relative residual "
       << sol.relative_residual() << ")";
    throw solver_failure(os.str(), sol.iters, sol.relative_residual());
  }
  StepResult out{sol.x, {}};
  StepReport& r = out.report;
  r.dt = dt;
  r.increment_norm = l2_norm(out.next - u);
  r.solver_iterations = sol.iters;
  r.solver_residual = sol.relative_residual();
  r.guaranteed_decrement = guaranteed_decrement(dt, r.increment_norm, scheme.smoothness(), scheme.convexity(), 0.0);
  if (opts.energies) {
    r.energy_before = energy_parts(u, scheme.params()).total_H;
    r.energy_after = energy_parts(out.next, scheme.params()).total_H;
  } else {
    r.energy_before = r.energy_after = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

SplittingProblem to_splitting_problem(const SHScheme& scheme) {
  const PhysParams p = scheme.params();
  SplittingProblem sp;
  sp.L = scheme.smoothness();
  sp.grad_nu1 = grad_phi1;
  const CGConfig cg = scheme.cg();
  if (scheme.branch() == Branch::eta_below_one) {
    // nu2 = phi2 + phi4, nu3 = phi3 (convex only)
    sp.mu2 = 1.0 - p.eta;
    sp.mu3 = 0.0;
    sp.nu3_convex_only = true;
    sp.grad_nu3 = grad_phi3;
  } else {
    // nu2 = phi4, nu3 = -phi2 + phi3
    sp.mu2 = 0.0;
    sp.mu3 = p.eta - 1.0;
    sp.nu3_convex_only = !(sp.mu3 > 0.0);
    sp.grad_nu3 = [p](const FieldD& u) { return grad_phi3(u) - grad_phi2(u, p); };
  }
  sp.implicit_solve = [scheme, cg](const FieldD& rhs, double dt, const FieldD& guess) {
    auto sol = cg_solve(implicit_operator(scheme, dt), rhs, cg, &guess);
    return ImplicitSolve{std::move(sol.x), sol.iters, sol.relative_residual(), sol.converged};
  };
  sp.nu_total = [p](const FieldD& u) { return energy_parts(u, p).total_H; };
  return sp;
}

double fixed_point_residual(const FieldD& u, const PhysParams& p) {
  const FieldD lap = laplacian(extend(u));
  const FieldD bilap = laplacian(extend(lap));
  FieldD r(u.grid());
  const auto& x = u.values();
  r.values() = x.array().cube().matrix() + (1.0 - p.eta) * x + p.epsilon * bilap.values() + 2.0 * lap.values();
  return l2_norm(r);
}

monitor_violation::monitor_violation(const std::string& check, std::size_t step, double lhs, double rhs)
    : std::runtime_error([&] {
        std::ostringstream os;
        os.precision(17);
        os << "monitor '" << check << "' violated at step " << step << ": " << lhs << " > " << rhs;
        return os.str();
      }()),
      check(check),
      step(step),
      lhs(lhs),
      rhs(rhs) {}

namespace {

RunMetadata metadata_of(const SHScheme& s) {
  RunMetadata m;
  m.grid = s.grid();
  m.params = s.params();
  m.bounds = s.bounds();
  m.sup_bound = s.sup_bound();
  m.dt_limit = s.dt_limit();
  return m;
}

RunRecord initial_record(const SHScheme& s, const FieldD& u, bool monitors) {
  RunRecord rec;
  if (monitors) {
    rec.energy = energy_parts(u, s.params());
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rec.energy = {nan, nan, nan, nan, nan, {}, {}};
  }
  rec.linf = linf_norm(u);
  rec.l2 = l2_norm(u);
  rec.supbound_slack = s.sup_bound() - rec.linf;
  rec.fp_residual = fixed_point_residual(u, s.params());
  return rec;
}

// Advances one monitored step and appends its record; returns the new state.
FieldD advance(const SHScheme& s, const FieldD& u, double dt, bool monitors, RunLog& log) {
  const RunRecord& prev = log.records.back();
  StepResult step = sh_step(s, u, dt, {nullptr, false, monitors});
  RunRecord rec;
  rec.n = prev.n + 1;
  rec.t = prev.t + dt;
  rec.dt = dt;
  rec.linf = linf_norm(step.next);
  rec.l2 = l2_norm(step.next);
  rec.cg_iters = step.report.solver_iterations;
  rec.cg_residual = step.report.solver_residual;
  rec.supbound_slack = s.sup_bound() - rec.linf;
  rec.fp_residual = fixed_point_residual(step.next, s.params());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (monitors) {
    rec.energy = energy_parts(step.next, s.params());
    step.report.energy_before = prev.energy.total_H;
    step.report.energy_after = rec.energy.total_H;
    rec.dissipation_slack = dissipation_check(step.report, s.smoothness(), s.convexity(), 0.0).slack;
    const double h_tol = 1e-10 * (1.0 + std::abs(prev.energy.total_H));
    if (rec.energy.total_H > prev.energy.total_H + h_tol)
      throw monitor_violation("energy", rec.n, rec.energy.total_H, prev.energy.total_H + h_tol);
    const double s_tol = 1e-10 * (1.0 + s.sup_bound());
    if (rec.linf > s.sup_bound() + s_tol) throw monitor_violation("sup_bound", rec.n, rec.linf, s.sup_bound() + s_tol);
  } else {
    rec.energy = {nan, nan, nan, nan, nan, {}, {}};
    rec.dissipation_slack = nan;
  }
  log.records.push_back(rec);
  return std::move(step.next);
}

}  // namespace

RunLog run(const SHScheme& scheme, const FieldD& u0, double dt, std::size_t n_steps, const RunOptions& opts) {
  require_same_grid(scheme.grid(), u0.grid(), "run");
  if (!(dt > 0.0)) throw std::invalid_argument("run: dt must be positive");
  if (opts.monitors && scheme.dt_limit() && dt > *scheme.dt_limit())
    throw std::invalid_argument("run: dt exceeds the stability limit");
  RunLog log;
  log.meta = metadata_of(scheme);
  log.records.push_back(initial_record(scheme, u0, opts.monitors));
  if (opts.on_step) opts.on_step(log.records.back(), u0);
  FieldD u = u0;
  for (std::size_t n = 0; n < n_steps; ++n) {
    u = advance(scheme, u, dt, opts.monitors, log);
    if (opts.on_step) opts.on_step(log.records.back(), u);
  }
  log.final_state = std::move(u);
  return log;
}

double next_dt(double dt, double target_decrement, double observed_decrement, double dt_lo, double dt_hi,
               double growth_cap) {
  double factor = growth_cap;
  if (observed_decrement > 0.0 && target_decrement > 0.0)
    factor = std::min(growth_cap, std::sqrt(target_decrement / observed_decrement));
  return std::clamp(dt * factor, dt_lo, dt_hi);
}

RunLog adaptive_run(const SHScheme& scheme, const FieldD& u0, double dt_lo, double dt_hi, double target_residual,
                    std::size_t max_steps, const AdaptiveOptions& opts) {
  require_same_grid(scheme.grid(), u0.grid(), "adaptive_run");
  if (!(dt_lo > 0.0) || !(dt_lo <= dt_hi)) throw std::invalid_argument("adaptive_run: need 0 < dt_lo <= dt_hi");
  if (scheme.dt_limit() && !(dt_hi < *scheme.dt_limit()))
    throw std::invalid_argument("adaptive_run: dt_hi must lie strictly below the stability limit");
  if (!(target_residual > 0.0)) throw std::invalid_argument("adaptive_run: target residual must be positive");
  const bool monitors = true;
  RunLog log;
  log.meta = metadata_of(scheme);
  log.records.push_back(initial_record(scheme, u0, monitors));
  if (opts.run.on_step) opts.run.on_step(log.records.back(), u0);
  FieldD u = u0;
  double dt = std::clamp(opts.dt_initial.value_or(dt_lo), dt_lo, dt_hi);
  for (std::size_t n = 0; n < max_steps && log.records.back().fp_residual > target_residual; ++n) {
    const double h_before = log.records.back().energy.total_H;
    u = advance(scheme, u, dt, monitors, log);
    if (opts.run.on_step) opts.run.on_step(log.records.back(), u);
    const double observed = h_before - log.records.back().energy.total_H;
    dt = next_dt(dt, opts.target_fraction * std::abs(h_before), observed, dt_lo, dt_hi, opts.growth_cap);
  }
  log.converged = log.records.back().fp_residual <= target_residual;
  log.final_state = std::move(u);
  return log;
}

}  // namespace shsplit

#pragma once

// Linearly implicit Swift-Hohenberg stepper. For eta < 1
//   (1/dt + 1 - eta) X + eps Lap^2 X = U/dt - U^3 - 2 Lap U,
// for eta >= 1
//   (1/dt) X + eps Lap^2 X = U/dt - U^3 + (eta - 1) U - 2 Lap U.

#include "shsplit/energy.hpp"
#include "shsplit/linsolve.hpp"
#include "shsplit/splitting.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace shsplit {

enum class Branch { eta_below_one, eta_at_least_one };

inline Branch branch_for(double eta) { return eta < 1.0 ? Branch::eta_below_one : Branch::eta_at_least_one; }

struct SchemeOptions {
  std::optional<double> zeta;  ///< default_zeta when empty
  SobolevOptions sobolev;
  CGConfig cg;
};

class SHScheme {
 public:
  /// Bounds taken as given (M, C, zeta), with the sup bound supplied by the caller.
  SHScheme(const GridSpec& grid, const PhysParams& params, const BoundParams& bounds, double sup_bound,
           const CGConfig& cg = {});

  /// Computes the Sobolev constant, zeta and M from the initial state and
  /// freezes them.
  static SHScheme initialize(const FieldD& u0, const PhysParams& params, const SchemeOptions& opts = {});

  const GridSpec& grid() const { return grid_; }
  const PhysParams& params() const { return params_; }
  const BoundParams& bounds() const { return bounds_; }
  double sup_bound() const { return sup_bound_; }
  Branch branch() const { return branch_; }
  const CGConfig& cg() const { return cg_; }
  /// 2/(3M^2 - |1-eta|), empty when unbounded.
  std::optional<double> dt_limit() const { return dt_limit_; }
  /// Smoothness constant 3M^2 of the explicit cubic part.
  double smoothness() const { return 3.0 * bounds_.m_trunc * bounds_.m_trunc; }
  /// Combined convexity modulus |1 - eta|.
  double convexity() const { return std::abs(1.0 - params_.eta); }

 private:
  GridSpec grid_;
  PhysParams params_;
  BoundParams bounds_;
  double sup_bound_;
  Branch branch_;
  CGConfig cg_;
  std::optional<double> dt_limit_;
};

LinearOperator<double> implicit_operator(const SHScheme& scheme, double dt);

/// Right-hand side of the implicit system before forcing.
FieldD explicit_rhs(const SHScheme& scheme, const FieldD& u, double dt);

struct StepOptions {
  const FieldD* forcing = nullptr;  ///< added to the right-hand side (verification only)
  bool energies = true;
  bool enforce_dt_limit = true;
};

/// One step, starting CG from U. Throws std::invalid_argument for dt out of
/// range and solver_failure when CG does not converge.
StepResult sh_step(const SHScheme& scheme, const FieldD& u, double dt, const StepOptions& opts = {});

/// The same scheme expressed through the generic splitting interface.
SplittingProblem to_splitting_problem(const SHScheme& scheme);

/// |U^3 + (1-eta) U + eps Lap^2 U + 2 Lap U| in the weighted norm.
double fixed_point_residual(const FieldD& u, const PhysParams& p);

struct RunRecord {
  std::size_t n = 0;
  double t = 0.0;
  double dt = 0.0;
  EnergyBreakdown energy;
  double linf = 0.0;
  double l2 = 0.0;
  std::size_t cg_iters = 0;
  double cg_residual = 0.0;
  double dissipation_slack = 0.0;
  double supbound_slack = 0.0;
  double fp_residual = 0.0;
};

struct RunMetadata {
  GridSpec grid;
  PhysParams params;
  BoundParams bounds;
  double sup_bound = 0.0;
  std::optional<double> dt_limit;
  std::uint64_t seed = 0;
  std::string config_digest;
};

struct RunLog {
  RunMetadata meta;
  std::vector<RunRecord> records;
  FieldD final_state;
  bool converged = false;  ///< adaptive runs: residual target reached
};

class monitor_violation : public std::runtime_error {
 public:
  monitor_violation(const std::string& check, std::size_t step, double lhs, double rhs);
  std::string check;
  std::size_t step;
  double lhs;
  double rhs;
};

struct RunOptions {
  bool monitors = true;
  std::function<void(const RunRecord&, const FieldD&)> on_step;  ///< also called for the initial state
};

/// Fixed-step march. With monitors on, every step must satisfy
/// H(U^{n+1}) <= H(U^n) + tol and |U^{n+1}|_inf <= sup_bound + tol,
/// tol = 1e-10 (1 + scale); a violation throws monitor_violation.
RunLog run(const SHScheme& scheme, const FieldD& u0, double dt, std::size_t n_steps, const RunOptions& opts = {});

struct AdaptiveOptions {
  double target_fraction = 1e-2;  ///< target decrement as a fraction of |H|
  double growth_cap = 1.5;
  std::optional<double> dt_initial;  ///< dt_lo when empty
  RunOptions run;
};

/// Step-size controller dt <- clamp(dt * min(cap, sqrt(target/observed)), dt_lo, dt_hi);
/// grows by the cap when the observed decrement is not positive.
double next_dt(double dt, double target_decrement, double observed_decrement, double dt_lo, double dt_hi,
               double growth_cap);

/// Marches with dt in [dt_lo, dt_hi] until the fixed-point residual reaches
/// target_residual or max_steps is hit (converged = false, not an error).
RunLog adaptive_run(const SHScheme& scheme, const FieldD& u0, double dt_lo, double dt_hi, double target_residual,
                    std::size_t max_steps, const AdaptiveOptions& opts = {});

}  // namespace shsplit

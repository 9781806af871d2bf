#pragma once

// Generic smooth-convex-concave splitting step:
//   (U' - U)/dt = -(grad nu1(U) + grad nu2(U') - grad nu3(U))
// with nu1 L-smooth, nu2 mu2-strongly convex and nu3 mu3-strongly convex.

#include "shsplit/lattice.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace shsplit {

struct ImplicitSolve {
  FieldD x;
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = true;
};

struct SplittingProblem {
  std::function<FieldD(const FieldD&)> grad_nu1;
  std::function<FieldD(const FieldD&)> grad_nu3;
  /// Solves grad nu2(X) + X/dt = rhs; `guess` is a starting point.
  std::function<ImplicitSolve(const FieldD& rhs, double dt, const FieldD& guess)> implicit_solve;
  double L = 0.0;
  double mu2 = 0.0;
  double mu3 = 0.0;
  /// nu3 merely convex: every formula uses mu3 = 0.
  bool nu3_convex_only = false;
  std::function<double(const FieldD&)> nu_total;

  double effective_mu3() const { return nu3_convex_only ? 0.0 : mu3; }
  void validate() const;
};

struct StepReport {
  double dt = 0.0;
  double increment_norm = 0.0;
  double energy_before = 0.0;  ///< NaN without nu_total
  double energy_after = 0.0;
  double guaranteed_decrement = 0.0;
  std::size_t solver_iterations = 0;
  double solver_residual = 0.0;
};

struct StepResult {
  FieldD next;
  StepReport report;
};

class solver_failure : public std::runtime_error {
 public:
  solver_failure(const std::string& what, std::size_t iters, double residual)
      : std::runtime_error(what), iterations(iters), residual(residual) {}
  std::size_t iterations;
  double residual;
};

/// (1/dt - (L - mu2 - mu3)/2) * increment^2
double guaranteed_decrement(double dt, double increment_norm, double L, double mu2, double mu3);

StepResult scc_step(const SplittingProblem& problem, const FieldD& u, double dt);

/// 2/(L - mu2 - mu3), or empty (unbounded) when L <= mu2 + mu3.
std::optional<double> max_stable_dt(double L, double mu2, double mu3);

struct DissipationCheck {
  bool passed;
  double energy_change;  ///< energy_after - energy_before
  double bound;          ///< -guaranteed_decrement + tol
  double slack;          ///< bound - energy_change

  std::string describe() const;
};

/// Passes when the energy change is at most -guaranteed + tol and at most tol,
/// tol = 1e-10 (1 + |energy_before|).
DissipationCheck dissipation_check(const StepReport& report, double L, double mu2, double mu3);

struct ErrorConstants {
  double prefactor;
  double exp_factor;
  std::optional<double> dt_max;  ///< r kappa2 / Lhat when Lhat > 0
};

/// Computable constants of the error estimate for Lhat = L - mu2 - mu3 != 0.
ErrorConstants error_prefactor(double L, double mu2, double mu3, double kappa1, double kappa2, double r, double T);

}  // namespace shsplit

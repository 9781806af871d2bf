#include "shsplit/splitting.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace shsplit {

void SplittingProblem::validate() const {
  if (!grad_nu1 || !grad_nu3 || !implicit_solve) throw std::invalid_argument("SplittingProblem: missing callable");
  if (!(L >= 0.0) || !(mu2 >= 0.0)) throw std::invalid_argument("SplittingProblem: need L >= 0 and mu2 >= 0");
  if (!nu3_convex_only && !(mu3 > 0.0))
    throw std::invalid_argument("SplittingProblem: mu3 must be > 0 (set nu3_convex_only for a convex nu3)");
}

double guaranteed_decrement(double dt, double increment_norm, double L, double mu2, double mu3) {
  return (1.0 / dt - (L - mu2 - mu3) / 2.0) * increment_norm * increment_norm;
}

StepResult scc_step(const SplittingProblem& problem, const FieldD& u, double dt) {
  problem.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("scc_step: dt must be positive");
  const FieldD rhs = (1.0 / dt) * u - problem.grad_nu1(u) + problem.grad_nu3(u);
  ImplicitSolve sol = problem.implicit_solve(rhs, dt, u);
  if (!sol.converged) {
    std::ostringstream os;
    os << "scc_step: implicit solve did not converge after " << sol.iterations << " iterations (residual "
       << sol.residual << ")";
    throw solver_failure(os.str(), sol.iterations, sol.residual);
  }
  StepResult out{std::move(sol.x), {}};
  StepReport& r = out.report;
  r.dt = dt;
  r.increment_norm = l2_norm(out.next - u);
  r.solver_iterations = sol.iterations;
  r.solver_residual = sol.residual;
  r.guaranteed_decrement = guaranteed_decrement(dt, r.increment_norm, problem.L, problem.mu2, problem.effective_mu3());
  if (problem.nu_total) {
    r.energy_before = problem.nu_total(u);
    r.energy_after = problem.nu_total(out.next);
  } else {
    r.energy_before = r.energy_after = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::optional<double> max_stable_dt(double L, double mu2, double mu3) {
  if (!(L >= 0.0) || !(mu2 >= 0.0) || !(mu3 >= 0.0)) throw std::invalid_argument("max_stable_dt: negative constant");
  if (L <= mu2 + mu3) return std::nullopt;
  return 2.0 / (L - mu2 - mu3);
}

std::string DissipationCheck::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "energy change " << energy_change << " vs bound " << bound << " (slack " << slack << ")";
  return os.str();
}

DissipationCheck dissipation_check(const StepReport& report, double L, double mu2, double mu3) {
  if (!std::isfinite(report.energy_before) || !std::isfinite(report.energy_after))
    throw std::invalid_argument("dissipation_check: report carries no energies");
  const double tol = 1e-10 * (1.0 + std::abs(report.energy_before));
  const double change = report.energy_after - report.energy_before;
  const double bound = -guaranteed_decrement(report.dt, report.increment_norm, L, mu2, mu3) + tol;
  const double slack = std::min(bound - change, tol - change);
  return {slack >= 0.0, change, bound, slack};
}

ErrorConstants error_prefactor(double L, double mu2, double mu3, double kappa1, double kappa2, double r, double T) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("error_prefactor: r must lie in (0,1)");
  if (!(kappa1 > 0.0 && kappa2 > 0.0 && kappa1 + kappa2 < 2.0))
    throw std::invalid_argument("error_prefactor: need kappa1, kappa2 > 0 and kappa1 + kappa2 < 2");
  if (!(T >= 0.0)) throw std::invalid_argument("error_prefactor: T must be >= 0");
  const double lhat = L - mu2 - mu3;
  if (lhat == 0.0) throw std::domain_error("error_prefactor: L - mu2 - mu3 must be nonzero (inflate L)");
  const double theta = lhat > 0.0 ? 1.0 : 0.0;
  const double a = std::abs(lhat);
  ErrorConstants ec{};
  ec.prefactor = std::sqrt(kappa1 * kappa2 / ((2.0 - kappa1 - kappa2) * (kappa1 * lhat * lhat + 4.0 * kappa2 * L * L)));
  const double rate = 4.0 * L * L / (kappa1 * a) + a / (kappa2 * (1.0 - r * theta));
  ec.exp_factor = std::sqrt(std::expm1(rate * T));
  if (lhat > 0.0) ec.dt_max = r * kappa2 / lhat;
  return ec;
}

}  // namespace shsplit

#include <doctest.h>

#include "shsplit/sh_scheme.hpp"
#include "shsplit/splitting.hpp"
#include "shsplit/verify/random_fields.hpp"

#include <cmath>

using namespace shsplit;
using verify::Rng;

namespace {

// nu1 = a/2 |U|^2, nu2 = b/2 |U|^2, nu3 = c/2 |U|^2
SplittingProblem scalar_quadratics(double a, double b, double c) {
  SplittingProblem p;
  p.grad_nu1 = [a](const FieldD& u) { return a * u; };
  p.grad_nu3 = [c](const FieldD& u) { return c * u; };
  p.implicit_solve = [b](const FieldD& rhs, double dt, const FieldD&) {
    return ImplicitSolve{(1.0 / (1.0 / dt + b)) * rhs, 0, 0.0, true};
  };
  p.L = a;
  p.mu2 = b;
  p.mu3 = c;
  p.nu_total = [a, b, c](const FieldD& u) { return 0.5 * (a + b - c) * norm_sq(u); };
  return p;
}

// Truncated quartic on its own: nu1 = phi1_tilde(M), nu2 = 0, nu3 = mu/2 |U|^2
// shifted back into nu2 so the total is phi1_tilde.
SplittingProblem truncated_quartic_problem(double m, double mu) {
  SplittingProblem p;
  p.grad_nu1 = [m](const FieldD& u) { return grad_phi1_tilde(u, m); };
  p.grad_nu3 = [mu](const FieldD& u) { return mu * u; };
  p.implicit_solve = [mu](const FieldD& rhs, double dt, const FieldD&) {
    return ImplicitSolve{(1.0 / (1.0 / dt + mu)) * rhs, 0, 0.0, true};
  };
  p.L = 3 * m * m;
  p.mu2 = mu;
  p.mu3 = mu;
  p.nu_total = [m](const FieldD& u) { return phi1_tilde(u, m); };
  return p;
}

}  // namespace

TEST_CASE("scalar quadratic problem reproduces the closed form") {
  Rng rng(1);
  std::uniform_real_distribution<double> d(0.0, 3.0);
  const auto g = GridSpec::cube(3, 1.0);
  for (int t = 0; t < 100; ++t) {
    const double a = d(rng), b = d(rng), c = 0.01 + d(rng), dt = 0.01 + d(rng) / 10;
    REQUIRE(1 / dt - a + c > 0);
    const auto u = verify::uniform_noise(g, rng);
    const auto step = scc_step(scalar_quadratics(a, b, c), u, dt);
    const FieldD expected = ((1 / dt - a + c) / (1 / dt + b)) * u;
    CHECK((step.next.values() - expected.values()).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(step.report.dt == dt);
    CHECK(step.report.increment_norm == doctest::Approx(l2_norm(step.next - u)));
  }
}

TEST_CASE("fixed points are preserved for every step size") {
  const auto g = GridSpec::cube(4, 1.0);
  Rng rng(2);
  // U = 0 is stationary for the quadratic problem and for Swift-Hohenberg
  for (double dt : {1e-4, 0.1, 10.0}) {
    const auto s = scc_step(scalar_quadratics(1.0, 0.5, 0.3), FieldD(g), dt);
    CHECK(s.next.values().cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.report.increment_norm == 0.0);
    CHECK(s.report.guaranteed_decrement == 0.0);
  }
  const SHScheme sh(g, {1.0, 0.5}, BoundParams{1.0, 1.0, 1.0}, 1.0);
  for (double dt : {1e-3, 0.1, 0.5}) {
    const auto s = scc_step(to_splitting_problem(sh), FieldD(g), dt);
    CHECK(s.next.values().cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("linear implicit part makes increments homogeneous") {
  Rng rng(3);
  const auto g = GridSpec::cube(4, 1.0);
  const SHScheme sh(g, {1.0, 0.4}, BoundParams{1.0, 1.0, 1.0}, 1.0, CGConfig{1e-13, 1e-300, 0});
  const auto prob = to_splitting_problem(sh);
  const auto rhs = verify::uniform_noise(g, rng);
  const FieldD zero(g);
  const double alpha = 3.7, dt = 0.05;
  const auto x1 = prob.implicit_solve(rhs, dt, zero);
  const auto x2 = prob.implicit_solve(alpha * rhs, dt, zero);
  CHECK((x2.x.values() - alpha * x1.x.values()).cwiseAbs().maxCoeff() <= 1e-10 * alpha * x1.x.values().cwiseAbs().maxCoeff());
}

TEST_CASE("step size restriction") {
  CHECK(*max_stable_dt(3.0, 0.0, 1.0) == 1.0);
  CHECK_FALSE(max_stable_dt(1.0, 1.0, 1.0).has_value());
  CHECK_FALSE(max_stable_dt(0.0, 0.0, 0.5).has_value());
  CHECK(*sh_dt_limit(1.0, 0.0) == 1.0);
  CHECK_THROWS_AS(max_stable_dt(-1.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("guaranteed decrement formula") {
  CHECK(guaranteed_decrement(0.5, 2.0, 3.0, 0.5, 0.5) == doctest::Approx((2.0 - 1.0) * 4.0));
  CHECK(guaranteed_decrement(0.1, 0.0, 3.0, 0.0, 0.0) == 0.0);
}

TEST_CASE("dissipation check on a zero increment") {
  StepReport r;
  r.dt = 0.1;
  r.increment_norm = 0.0;
  r.energy_before = r.energy_after = 2.0;
  const auto c = dissipation_check(r, 3.0, 0.0, 1.0);
  CHECK(c.passed);
  CHECK(c.energy_change == 0.0);
  CHECK(c.slack == doctest::Approx(1e-10 * 3.0));
  StepReport none;
  none.energy_before = std::nan("");
  CHECK_THROWS_AS(dissipation_check(none, 1, 0, 1), std::invalid_argument);
}

TEST_CASE("honest constants dissipate over 200 steps") {
  Rng rng(4);
  const auto g = GridSpec::cube(4, 1.0);
  const double m = 1.0, mu = 0.5;
  const auto prob = truncated_quartic_problem(m, mu);
  const double dt = *max_stable_dt(prob.L, prob.mu2, prob.mu3);
  FieldD u = verify::uniform_noise(g, rng, 3.0);
  for (int n = 0; n < 200; ++n) {
    auto s = scc_step(prob, u, dt);
    const auto c = dissipation_check(s.report, prob.L, prob.mu2, prob.mu3);
    REQUIRE_MESSAGE(c.passed, c.describe());
    u = std::move(s.next);
  }
}

TEST_CASE("oversized step on the truncated quartic breaks dissipation") {
  Rng rng(5);
  const auto g = GridSpec::cube(4, 1.0);
  const double m = 1.0, mu = 0.5;
  const auto prob = truncated_quartic_problem(m, mu);
  const double dt = 4.0 * *max_stable_dt(prob.L, prob.mu2, prob.mu3);
  FieldD u = verify::uniform_noise(g, rng, 3.0);
  bool failed = false;
  for (int n = 0; n < 20 && !failed; ++n) {
    auto s = scc_step(prob, u, dt);
    failed = !dissipation_check(s.report, prob.L, prob.mu2, prob.mu3).passed;
    u = std::move(s.next);
  }
  CHECK(failed);
}

TEST_CASE("solver failure and bad input propagate") {
  const auto g = GridSpec::cube(3, 1.0);
  auto p = scalar_quadratics(1, 1, 1);
  p.implicit_solve = [](const FieldD& rhs, double, const FieldD&) { return ImplicitSolve{rhs, 7, 0.5, false}; };
  try {
    (void)scc_step(p, FieldD(g, 1.0), 0.1);
    FAIL("expected solver_failure");
  } catch (const solver_failure& e) {
    CHECK(e.iterations == 7);
    CHECK(e.residual == 0.5);
  }
  CHECK_THROWS_AS(scc_step(scalar_quadratics(1, 1, 1), FieldD(g), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(scc_step(scalar_quadratics(1, 1, 0), FieldD(g), 0.1), std::invalid_argument);
  auto convex = scalar_quadratics(1, 1, 0);
  convex.nu3_convex_only = true;
  CHECK_NOTHROW(scc_step(convex, FieldD(g), 0.1));
  CHECK(convex.effective_mu3() == 0.0);
}

TEST_CASE("step report without an energy functional carries NaN energies") {
  auto p = scalar_quadratics(1, 1, 1);
  p.nu_total = nullptr;
  const auto s = scc_step(p, FieldD(GridSpec::cube(3, 1.0), 1.0), 0.1);
  CHECK(std::isnan(s.report.energy_before));
  CHECK(std::isnan(s.report.energy_after));
}

TEST_CASE("error constants at r = 1/2, kappa1 = kappa2 = 2/3 reduce to the closed forms") {
  Rng rng(6);
  std::uniform_real_distribution<double> d(0.1, 5.0);
  for (int t = 0; t < 100; ++t) {
    const double L = d(rng), mu2 = d(rng) / 4, mu3 = d(rng) / 4;
    const double lhat = L - mu2 - mu3;
    if (lhat == 0.0) continue;
    const auto ec = error_prefactor(L, mu2, mu3, 2.0 / 3, 2.0 / 3, 0.5, 1.0);
    CHECK(std::abs(ec.prefactor - 1 / std::sqrt(lhat * lhat + 4 * L * L)) <= 1e-14 * ec.prefactor);
    if (lhat > 0) {
      REQUIRE(ec.dt_max.has_value());
      CHECK(std::abs(*ec.dt_max - 1 / (3 * lhat)) <= 1e-14 * *ec.dt_max);
    } else {
      CHECK_FALSE(ec.dt_max.has_value());
    }
  }
}

TEST_CASE("error exponential factor") {
  CHECK(error_prefactor(3, 0.5, 0.5, 0.5, 0.5, 0.5, 0.0).exp_factor == 0.0);
  double prev = 0.0;
  for (double T : {0.1, 0.2, 0.5, 1.0}) {
    const double e = error_prefactor(3, 0.5, 0.5, 0.5, 0.5, 0.5, T).exp_factor;
    CHECK(e > prev);
    prev = e;
  }
  // rate = 4 L^2/(k1 |Lhat|) + |Lhat|/(k2 (1 - r theta))
  const double L = 3, lhat = 2, k1 = 0.5, k2 = 0.5, r = 0.5, T = 0.1;
  const double rate = 4 * L * L / (k1 * lhat) + lhat / (k2 * (1 - r));
  CHECK(error_prefactor(L, 0.5, 0.5, k1, k2, r, T).exp_factor == doctest::Approx(std::sqrt(std::exp(rate * T) - 1)));
  CHECK_THROWS_AS(error_prefactor(1, 0.5, 0.5, 0.5, 0.5, 0.5, 1), std::domain_error);
  CHECK_THROWS_AS(error_prefactor(3, 0, 1, 1.0, 1.0, 0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(error_prefactor(3, 0, 1, 0.5, 0.5, 1.0, 1), std::invalid_argument);
}

#include <doctest.h>

#include "shsplit/verify/convergence.hpp"
#include "shsplit/verify/convexity.hpp"
#include "shsplit/verify/dense_oracle.hpp"
#include "shsplit/verify/identities.hpp"
#include "shsplit/verify/random_fields.hpp"
#include "shsplit/verify/suites.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace shsplit;
using namespace shsplit::verify;

TEST_CASE("identity suite passes on an anisotropic grid") {
  const auto rep = identity_suite(GridSpec::from_lengths(5, 6, 7, 1.0, 1.3, 0.8), 100, 3);
  CHECK(rep.trials == 100);
  CHECK_MESSAGE(rep.passed(), rep.describe());
  CHECK(rep.sandwich_margin >= 0.0);
}

TEST_CASE("identity suite on zero fields has zero defects") {
  const auto rep = identity_suite(GridSpec::cube(4, 1.0), 10, 0, true);
  CHECK(rep.worst() == 0.0);
  CHECK(rep.passed());
}

TEST_CASE("random field generators") {
  Rng rng(1);
  const auto g = GridSpec::from_lengths(6, 5, 4, 1, 1, 1);
  const auto u = uniform_noise(g, rng, 2.0);
  CHECK(u.values().cwiseAbs().maxCoeff() <= 2.0);
  const auto f = filtered_noise(g, rng, 0.7);
  CHECK(std::abs(f.values().cwiseAbs().maxCoeff() - 0.7) <= 1e-15);
  const auto c = cosine_mode(g, 1, 0, 2, 0.5);
  CHECK(c(0, 0, 0) == doctest::Approx(0.5));
  CHECK(c(6, 3, 4) == doctest::Approx(-0.5));
  CHECK(uniform_sequence(7, rng).size() == 7);
}

TEST_CASE("dense oracle structure") {
  const auto g = GridSpec::from_spacings(3, 4, 5, 1, 1, 1);
  const auto o = dense_assemble(g);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(g.node_count()));
  CHECK((o.laplacian * ones).cwiseAbs().maxCoeff() <= 1e-13);
  const Eigen::MatrixXd wl = o.mass() * o.laplacian;
  CHECK((wl - wl.transpose()).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK((o.bilaplacian - o.laplacian * o.laplacian).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(o.weights.sum() == doctest::Approx(g.volume()).epsilon(1e-14));
  const Eigen::MatrixXd sym = o.sobolev_form - o.sobolev_form.transpose();
  CHECK(sym.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("convexity sampler: truncated quartic stays within its Lipschitz constant") {
  const double m = 1.0;
  const auto g = GridSpec::cube(4, 1.0);
  const auto rep = convexity_sampler(truncated_quartic(m), {3 * m * m, {}}, noise_pairs(g, 3 * m), 500, 9);
  CHECK_MESSAGE(rep.passed(), rep.describe());
  CHECK(rep.max_lipschitz_ratio <= 3 * m * m);
  CHECK(rep.max_lipschitz_ratio > 0.0);
}

TEST_CASE("convexity sampler: quadratic part saturates both bounds") {
  const PhysParams p{1.0, 0.5};
  const auto g = GridSpec::cube(4, 1.0);
  const auto rep = convexity_sampler(quadratic_part(p), {0.5, 0.5}, noise_pairs(g, 1.0), 200, 10);
  CHECK_MESSAGE(rep.passed(), rep.describe());
  CHECK(rep.max_lipschitz_ratio == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(rep.strong_convexity_slack) <= 1e-10);
}

TEST_CASE("convexity sampler: the untruncated quartic is a negative control") {
  const double m = 1.0;
  const auto g = GridSpec::cube(4, 1.0);
  const auto rep = convexity_sampler(quartic(), {3 * m * m, {}}, noise_pairs(g, 3 * m), 500, 11);
  CHECK_FALSE(rep.lipschitz_ok());
  CHECK(rep.max_lipschitz_ratio > 3 * m * m);
}

TEST_CASE("functional bundles have consistent gradients") {
  Rng rng(12);
  const auto g = GridSpec::from_lengths(4, 5, 3, 1, 1.2, 0.9);
  const PhysParams p{1.3, 0.4};
  for (const auto& f : {truncated_quartic(0.5), quartic(), quadratic_part(p), implicit_part(p), gradient_part(),
                        explicit_concave_part(p), bilaplacian_part(p)}) {
    const auto u = filtered_noise(g, rng, 1.0);
    const auto v = filtered_noise(g, rng, 1.0);
    CHECK_MESSAGE(directional_derivative_error(f, u, v) <= 1e-6, f.name);
  }
}

TEST_CASE("manufactured solution: source matches the closed form") {
  const auto g = GridSpec::from_lengths(6, 6, 6, 1.0, 2.0, 1.5);
  MMSProblem mms{{0.8, 0.3}, 0.5, 1.0, {1, 2, 1}};
  const double t = 0.37;
  const double pi = std::numbers::pi;
  const double k2 = std::pow(pi / 1.0, 2) + std::pow(2 * pi / 2.0, 2) + std::pow(pi / 1.5, 2);
  CHECK(mms.wavenumber_sq(g) == doctest::Approx(k2).epsilon(1e-14));
  const double a = 0.5 * std::cos(t), ad = -0.5 * std::sin(t);
  CHECK(mms.a(t) == doctest::Approx(a));
  CHECK(mms.a_dot(t) == doctest::Approx(ad));
  const double lin = (1 - 0.3) + 0.8 * k2 * k2 - 2 * k2;
  const auto phi = mms.shape(g);
  const auto s = mms.source(g, t);
  double worst = 0.0;
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    const double expected = (ad + lin * a) * phi[n] + a * a * a * std::pow(phi[n], 3);
    worst = std::max(worst, std::abs(s[n] - expected));
  }
  CHECK(worst <= 1e-12);
  CHECK((mms.exact(g, t).values() - a * phi.values()).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("manufactured solution: defect matches the stencils and shrinks as h^2") {
  MMSProblem mms{{1.0, 0.5}, 0.5, 1.0, {1, 1, 1}};
  std::vector<double> sizes;
  for (int n : {8, 16, 32}) {
    const auto g = GridSpec::cube(n, 1.0);
    const double t = 0.2, k2 = mms.wavenumber_sq(g);
    const auto u = mms.exact(g, t);
    const FieldD expected = 1.0 * (bilaplacian(u) - (k2 * k2) * u) + 2.0 * (laplacian(u) + k2 * u);
    const auto d = mms.defect(g, t);
    CHECK((d.values() - expected.values()).cwiseAbs().maxCoeff() <= 1e-9 * (1 + expected.values().cwiseAbs().maxCoeff()));
    sizes.push_back(d.values().cwiseAbs().maxCoeff());
  }
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    CHECK(sizes[i - 1] / sizes[i] >= 3.2);
    CHECK(sizes[i - 1] / sizes[i] <= 4.8);
  }
}

TEST_CASE("temporal study from the zero state has zero error") {
  const auto g = GridSpec::cube(4, 1.0);
  TemporalConfig cfg;
  cfg.u0 = FieldD(g);
  cfg.params = {1.0, 0.5};
  cfg.final_time = 0.04;
  cfg.dt_ladder = {0.02, 0.01, 0.005};
  cfg.reference_dt = 0.00025;
  const auto st = temporal_convergence(cfg);
  REQUIRE(st.levels.size() == 3);
  for (const auto& l : st.levels) {
    CHECK(l.error == 0.0);
    CHECK_FALSE(l.order.has_value());
  }
  CHECK(st.orders().empty());
}

TEST_CASE("temporal study rejects malformed ladders") {
  const auto g = GridSpec::cube(4, 1.0);
  TemporalConfig cfg;
  cfg.u0 = FieldD(g);
  cfg.params = {1.0, 0.5};
  cfg.final_time = 0.04;
  cfg.dt_ladder = {0.02, 0.01};
  cfg.reference_dt = 0.00025;
  CHECK_THROWS_AS(temporal_convergence(cfg), std::invalid_argument);
  cfg.dt_ladder = {0.02, 0.01, 0.005};
  cfg.reference_dt = 0.001;
  CHECK_THROWS_AS(temporal_convergence(cfg), std::invalid_argument);
  cfg.reference_dt = 0.00025;
  cfg.dt_ladder = {0.03, 0.01, 0.005};
  CHECK_THROWS_AS(temporal_convergence(cfg), std::invalid_argument);
}

TEST_CASE("temporal study on a small smooth problem is first order") {
  const auto g = GridSpec::cube(4, 2.0);
  TemporalConfig cfg;
  cfg.u0 = cosine_mode(g, 1, 1, 0, 0.5);
  cfg.params = {1.0, 0.5};
  cfg.final_time = 0.2;
  cfg.dt_ladder = {0.02, 0.01, 0.005};
  cfg.reference_dt = 0.0001;
  cfg.scheme.cg = {1e-12, 1e-300, 0};
  const auto st = temporal_convergence(cfg);
  for (double q : st.orders()) CHECK(std::abs(q - 1.0) <= 0.15);
  std::ostringstream os;
  write_study_csv(os, st);
  CHECK(os.str().rfind("level,dt,error,ratio,order,defect,defect_ratio,defect_order\n", 0) == 0);
}

TEST_CASE("spatial study with zero amplitude has zero error") {
  SpatialConfig cfg;
  cfg.mms = MMSProblem{{1.0, 0.5}, 0.0, 1.0, {1, 1, 1}};
  cfg.grids = {GridSpec::cube(4, 1.0), GridSpec::cube(6, 1.0), GridSpec::cube(8, 1.0)};
  cfg.dt = 1e-4;
  cfg.final_time = 1e-3;
  const auto st = spatial_convergence(cfg);
  REQUIRE(st.levels.size() == 3);
  for (const auto& l : st.levels) CHECK(l.error == 0.0);
  cfg.grids.pop_back();
  CHECK_THROWS_AS(spatial_convergence(cfg), std::invalid_argument);
}

TEST_CASE("suite runner") {
  CHECK(suite_names().size() == 5);
  CHECK_THROWS_AS(run_suites(VerifyLevel::quick, {}), std::invalid_argument);
  CHECK_THROWS_AS(run_suites(VerifyLevel::quick, {"nonsense"}), std::invalid_argument);
  const auto ok = run_suites(VerifyLevel::quick, {"identities", "spd"});
  REQUIRE(ok.size() == 2);
  for (const auto& r : ok) CHECK_MESSAGE(r.passed, r.name);
  const auto bad = run_suites(VerifyLevel::quick, {"oracle", "spd"}, Fault::broken_reflection);
  REQUIRE(bad.size() == 2);
  for (const auto& r : bad) CHECK_FALSE(r.passed);
}

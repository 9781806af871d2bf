#include "shsplit/verify/suites.hpp"

#include "shsplit/sh_scheme.hpp"
#include "shsplit/verify/convexity.hpp"
#include "shsplit/verify/dense_oracle.hpp"
#include "shsplit/verify/fixtures.hpp"
#include "shsplit/verify/identities.hpp"
#include "shsplit/verify/random_fields.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace shsplit::verify {
namespace {

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

struct Context {
  VerifyLevel level;
  Fault fault;
  SuiteResult* out;

  void check(bool ok, const std::string& line) {
    out->details.push_back((ok ? "PASS " : "FAIL ") + line);
    out->passed = out->passed && ok;
  }
  bool full() const { return level == VerifyLevel::full; }
};

// Unit spacing keeps operator entries O(1), so absolute tolerances are meaningful.
std::vector<GridSpec> oracle_grids(bool full) {
  std::vector<GridSpec> g{GridSpec::from_spacings(3, 3, 3, 1, 1, 1), GridSpec::from_spacings(4, 5, 6, 1, 1, 1)};
  if (full) g.push_back(GridSpec::from_spacings(8, 8, 8, 1, 1, 1));
  return g;
}

std::vector<GridSpec> identity_grids() {
  return {GridSpec::cube(3, 1.0), GridSpec::from_lengths(4, 5, 6, 1, 1, 1), GridSpec::cube(8, 1.0)};
}

LinearOperator<double> operator_under_test(Fault fault, const GridSpec& g, double eps, double eta, double dt) {
  if (fault == Fault::broken_reflection) return broken_reflection_operator(eps, dt);
  const SHScheme s(g, {eps, eta}, BoundParams{1.0, 1.0, 1.0}, 1.0);
  return implicit_operator(s, dt);
}

void suite_identities(Context& c) {
  const std::size_t trials = c.full() ? 1000 : 100;
  for (const auto& g : identity_grids()) {
    const auto rep = identity_suite(g, trials, 11);
    c.check(rep.passed(1e-12), "identities " + rep.describe());
  }
}

void suite_oracle(Context& c) {
  Rng rng(21);
  const double eps = 1.3, eta = 0.4, dt = 0.05;
  for (const auto& g : oracle_grids(c.full())) {
    const DenseOracle o = dense_assemble(g);
    const auto op = operator_under_test(c.fault, g, eps, eta, dt);
    const Eigen::MatrixXd dense_implicit = c.fault == Fault::none ? o.implicit_operator(eps, eta, dt)
                                                                   : o.implicit_operator(eps, 1.0, dt);
    double lap = 0, bilap = 0, grad = 0, impl = 0;
    for (int t = 0; t < 20; ++t) {
      const FieldD f = uniform_noise(g, rng);
      const auto e = extend(f);
      lap = std::max(lap, (laplacian(e).values() - o.laplacian * f.values()).cwiseAbs().maxCoeff());
      bilap = std::max(bilap, (bilaplacian(e).values() - o.bilaplacian * f.values()).cwiseAbs().maxCoeff());
      for (DiffKind k : {DiffKind::forward, DiffKind::backward}) {
        const auto gv = gradient(e, k);
        for (Axis a : kAxes)
          grad = std::max(grad, (gv[a].values() - o.difference(a, k) * f.values()).cwiseAbs().maxCoeff());
      }
      impl = std::max(impl, (op.apply(f).values() - dense_implicit * f.values()).cwiseAbs().maxCoeff());
    }
    std::ostringstream name;
    name << g.nx() << "x" << g.ny() << "x" << g.nz();
    c.check(lap <= 1e-13, "oracle laplacian " + name.str() + " max_abs=" + sci(lap));
    c.check(bilap <= 1e-13, "oracle bilaplacian " + name.str() + " max_abs=" + sci(bilap));
    c.check(grad <= 1e-13, "oracle gradient " + name.str() + " max_abs=" + sci(grad));
    c.check(impl <= 1e-13, "oracle implicit_operator " + name.str() + " max_abs=" + sci(impl));
  }
}

void suite_spd(Context& c) {
  for (const auto& g : {GridSpec::cube(4, 1.0), GridSpec::from_lengths(4, 5, 6, 1, 1, 1)}) {
    for (double eta : {0.5, 1.5}) {
      const auto op = operator_under_test(c.fault, g, 1.0, eta, 0.01);
      const auto rep = spd_probe(op, g, 100, 5);
      c.check(rep.passed, "spd_probe " + op.descriptor + " eta=" + std::to_string(eta) + " symmetry=" +
                              sci(rep.worst_symmetry) + " positivity=" + sci(rep.worst_positivity));
    }
  }
}

void suite_gradients(Context& c) {
  const GridSpec g = GridSpec::cube(4, 2.0);
  const PhysParams p{1.0, 0.5};
  Rng rng(31);
  const std::vector<FunctionalBundle> bundles{quartic(), truncated_quartic(0.4), quadratic_part(p), gradient_part(),
                                              bilaplacian_part(p)};
  for (const auto& b : bundles) {
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const FieldD u = filtered_noise(g, rng, 0.8);
      const FieldD v = filtered_noise(g, rng, 1.0);
      worst = std::max(worst, directional_derivative_error(b, u, v, 1e-5));
    }
    c.check(worst <= 1e-6, "gradient " + b.name + " worst_rel=" + sci(worst));
  }
}

void suite_convexity(Context& c) {
  const GridSpec g = GridSpec::cube(4, 2.0);
  const std::size_t trials = c.full() ? 10000 : 1000;
  const double m = 1.0;
  const auto lip = convexity_sampler(truncated_quartic(m), {3 * m * m, {}}, noise_pairs(g, 3 * m), trials, 41);
  c.check(lip.lipschitz_ok() && lip.descent_ok(), "lipschitz " + lip.describe());
  const PhysParams below{1.0, 0.5}, above{1.0, 1.5};
  const auto sc = convexity_sampler(implicit_part(below), {{}, 1 - below.eta}, noise_pairs(g, 1.0), trials / 10, 42);
  c.check(sc.strong_convexity_ok() && sc.monotone_ok(), "strong convexity " + sc.describe());
  const auto cc = convexity_sampler(explicit_concave_part(above), {{}, above.eta - 1}, noise_pairs(g, 1.0), trials / 10, 43);
  c.check(cc.strong_convexity_ok() && cc.monotone_ok(), "strong convexity " + cc.describe());
  const auto g3 = convexity_sampler(gradient_part(), {{}, 0.0}, noise_pairs(g, 1.0), trials / 10, 44);
  c.check(g3.monotone_ok(), "monotone " + g3.describe());
  // the untruncated quartic must violate the same global constant
  const auto neg = convexity_sampler(quartic(), {3 * m * m, {}}, noise_pairs(g, 3 * m), trials, 45);
  c.check(!neg.lipschitz_ok(), "negative control (untruncated quartic fails) " + neg.describe());
}

const std::map<std::string, std::function<void(Context&)>>& registry() {
  static const std::map<std::string, std::function<void(Context&)>> r{
      {"identities", suite_identities}, {"oracle", suite_oracle},     {"spd", suite_spd},
      {"gradients", suite_gradients},   {"convexity", suite_convexity}};
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"identities", "oracle", "spd", "gradients", "convexity"};
  return names;
}

std::vector<SuiteResult> run_suites(VerifyLevel level, const std::vector<std::string>& selection, Fault fault) {
  if (selection.empty()) throw std::invalid_argument("verify: empty suite selection");
  std::vector<std::string> chosen;
  for (const auto& s : selection) {
    if (s == "all") {
      chosen = suite_names();
      break;
    }
    if (!registry().count(s)) throw std::invalid_argument("verify: unknown suite '" + s + "'");
    if (std::find(chosen.begin(), chosen.end(), s) == chosen.end()) chosen.push_back(s);
  }
  std::vector<SuiteResult> results;
  for (const auto& name : chosen) {
    SuiteResult r;
    r.name = name;
    r.passed = true;
    Context ctx{level, fault, &r};
    const auto t0 = std::chrono::steady_clock::now();
    registry().at(name)(ctx);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace shsplit::verify

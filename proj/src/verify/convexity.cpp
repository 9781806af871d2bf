#include "shsplit/verify/convexity.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace shsplit::verify {

std::string ConvexityReport::describe() const {
  std::ostringstream os;
  os.precision(4);
  os << std::scientific << name << " trials=" << trials << " max_lip_ratio=" << max_lipschitz_ratio
     << " lip_slack=" << lipschitz_slack << " descent_slack=" << descent_slack
     << " strong_slack=" << strong_convexity_slack << " monotone_slack=" << monotone_slack;
  return os.str();
}

ConvexityReport convexity_sampler(const FunctionalBundle& f, const ConvexityConstants& c, const PairGenerator& pairs,
                                  std::size_t trials, std::uint64_t seed, double tol) {
  if (trials == 0) throw std::invalid_argument("convexity_sampler: trials must be >= 1");
  constexpr double inf = std::numeric_limits<double>::infinity();
  ConvexityReport rep;
  rep.name = f.name;
  rep.trials = trials;
  rep.tol = tol;
  rep.lipschitz_slack = rep.descent_slack = rep.strong_convexity_slack = rep.monotone_slack = inf;
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto [u, v] = pairs(rng);
    const FieldD gu = f.gradient(u), gv = f.gradient(v);
    const FieldD d = v - u;
    const double dn = l2_norm(d);
    const double gn = l2_norm(gu - gv);
    if (dn > 0.0) rep.max_lipschitz_ratio = std::max(rep.max_lipschitz_ratio, gn / dn);
    const double fu = f.value(u), fv = f.value(v);
    const double lin = fu + inner_product(gu, d);
    const double fscale = std::abs(fu) + std::abs(fv) + std::abs(inner_product(gu, d)) + 1.0;
    if (c.lipschitz) {
      const double L = *c.lipschitz;
      rep.lipschitz_slack = std::min(rep.lipschitz_slack, (L * dn - gn) / (L * dn + gn + 1.0));
      const double upper = lin + 0.5 * L * dn * dn;
      rep.descent_slack = std::min(rep.descent_slack, (upper - fv) / (fscale + 0.5 * L * dn * dn));
    }
    if (c.modulus) {
      const double mu = *c.modulus;
      const double lower = lin + 0.5 * mu * dn * dn;
      rep.strong_convexity_slack = std::min(rep.strong_convexity_slack, (fv - lower) / (fscale + 0.5 * mu * dn * dn));
      const double mono = inner_product(gv - gu, d) - mu * dn * dn;
      rep.monotone_slack = std::min(rep.monotone_slack, mono / (gn * dn + mu * dn * dn + 1.0));
    }
  }
  return rep;
}

double directional_derivative_error(const FunctionalBundle& f, const FieldD& u, const FieldD& v, double h) {
  const double fd = (f.value(u + h * v) - f.value(u - h * v)) / (2.0 * h);
  const double an = inner_product(f.gradient(u), v);
  const double scale = std::max(std::abs(fd), std::abs(an));
  return scale > 0.0 ? std::abs(fd - an) / scale : 0.0;
}

PairGenerator noise_pairs(const GridSpec& grid, double linf_max) {
  return [grid, linf_max](Rng& rng) {
    std::uniform_real_distribution<double> amp(0.0, linf_max);
    FieldD u = filtered_noise(grid, rng, amp(rng));
    FieldD v = filtered_noise(grid, rng, amp(rng));
    return std::pair{std::move(u), std::move(v)};
  };
}

FunctionalBundle truncated_quartic(double m) {
  return {"truncated quartic (M=" + std::to_string(m) + ")", [m](const FieldD& u) { return phi1_tilde(u, m); },
          [m](const FieldD& u) { return grad_phi1_tilde(u, m); }};
}

FunctionalBundle quartic() { return {"quartic", phi1, grad_phi1}; }

FunctionalBundle quadratic_part(const PhysParams& p) {
  return {"phi2", [p](const FieldD& u) { return phi2(u, p); }, [p](const FieldD& u) { return grad_phi2(u, p); }};
}

FunctionalBundle implicit_part(const PhysParams& p) {
  return {"phi2+phi4", [p](const FieldD& u) { return phi2(u, p) + phi4(u, p); },
          [p](const FieldD& u) { return grad_phi2(u, p) + grad_phi4(u, p); }};
}

FunctionalBundle gradient_part() { return {"phi3", phi3, grad_phi3}; }

FunctionalBundle explicit_concave_part(const PhysParams& p) {
  return {"-phi2+phi3", [p](const FieldD& u) { return phi3(u) - phi2(u, p); },
          [p](const FieldD& u) { return grad_phi3(u) - grad_phi2(u, p); }};
}

FunctionalBundle bilaplacian_part(const PhysParams& p) {
  return {"phi4", [p](const FieldD& u) { return phi4(u, p); }, [p](const FieldD& u) { return grad_phi4(u, p); }};
}

}  // namespace shsplit::verify

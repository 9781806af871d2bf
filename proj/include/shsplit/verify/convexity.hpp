#pragma once

#include "shsplit/energy.hpp"
#include "shsplit/verify/random_fields.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>

namespace shsplit::verify {

struct FunctionalBundle {
  std::string name;
  std::function<double(const FieldD&)> value;
  std::function<FieldD(const FieldD&)> gradient;
};

struct ConvexityConstants {
  std::optional<double> lipschitz;  ///< L: checks the Lipschitz-gradient and descent inequalities
  std::optional<double> modulus;    ///< mu: checks strong convexity and the monotone-gradient form
};

/// Slacks are scale-relative; a check passes when its slack is >= -tol.
struct ConvexityReport {
  std::string name;
  std::size_t trials = 0;
  double max_lipschitz_ratio = 0.0;  ///< max |grad U - grad V| / |U - V|
  double lipschitz_slack = 0.0;
  double descent_slack = 0.0;
  double strong_convexity_slack = 0.0;
  double monotone_slack = 0.0;
  double tol = 1e-10;

  bool lipschitz_ok() const { return lipschitz_slack >= -tol; }
  bool descent_ok() const { return descent_slack >= -tol; }
  bool strong_convexity_ok() const { return strong_convexity_slack >= -tol; }
  bool monotone_ok() const { return monotone_slack >= -tol; }
  bool passed() const { return lipschitz_ok() && descent_ok() && strong_convexity_ok() && monotone_ok(); }
  std::string describe() const;
};

using PairGenerator = std::function<std::pair<FieldD, FieldD>(Rng&)>;

/// Samples the inequalities implied by `constants` on `trials` random pairs.
/// Checks whose constant is absent report +inf slack.
ConvexityReport convexity_sampler(const FunctionalBundle& f, const ConvexityConstants& constants,
                                  const PairGenerator& pairs, std::size_t trials, std::uint64_t seed = 0,
                                  double tol = 1e-10);

/// |(f(U+hV) - f(U-hV))/2h - <grad f(U), V>| relative to the larger of the two.
double directional_derivative_error(const FunctionalBundle& f, const FieldD& u, const FieldD& v, double h = 1e-5);

/// Pairs of filtered-noise fields with max-norm drawn uniformly in [0, linf_max].
PairGenerator noise_pairs(const GridSpec& grid, double linf_max);

// The functionals the scheme's splitting relies on.
FunctionalBundle truncated_quartic(double m);
FunctionalBundle quartic();
FunctionalBundle quadratic_part(const PhysParams& p);           ///< phi2
FunctionalBundle implicit_part(const PhysParams& p);            ///< phi2 + phi4
FunctionalBundle gradient_part();                               ///< phi3
FunctionalBundle explicit_concave_part(const PhysParams& p);    ///< -phi2 + phi3
FunctionalBundle bilaplacian_part(const PhysParams& p);         ///< phi4

}  // namespace shsplit::verify

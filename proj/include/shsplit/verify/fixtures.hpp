#pragma once

// Deliberately wrong operators used as negative controls.

#include "shsplit/calculus.hpp"
#include "shsplit/linsolve.hpp"

namespace shsplit::verify {

/// Extension whose ghosts reflect about the half-index (-m -> m-1,
/// N+m -> N-m+1) instead of about the boundary node.
inline ExtendedField<double> extend_broken(const FieldD& f) {
  const GridSpec& g = f.grid();
  constexpr int G = ExtendedField<double>::kGhost;
  auto shift = [](int m, int n) { return m < 0 ? -m - 1 : (m > n ? 2 * n - m + 1 : m); };
  ExtendedField<double> e(g);
  for (int k = -G; k <= g.nz() + G; ++k)
    for (int j = -G; j <= g.ny() + G; ++j)
      for (int i = -G; i <= g.nx() + G; ++i) e(i, j, k) = f(shift(i, g.nx()), shift(j, g.ny()), shift(k, g.nz()));
  return e;
}

/// (1/dt) I + eps Lap^2 built on the broken extension.
inline LinearOperator<double> broken_reflection_operator(double epsilon, double dt) {
  return {[epsilon, dt](const FieldD& x) {
            const FieldD lap = laplacian(extend_broken(x));
            FieldD out = laplacian(extend_broken(lap));
            out.values() = x.values() / dt + epsilon * out.values();
            return out;
          },
          "broken-reflection implicit operator"};
}

}  // namespace shsplit::verify

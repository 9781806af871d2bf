#pragma once

#include "shsplit/calculus.hpp"

#include <cstdint>
#include <string>

namespace shsplit::verify {

/// Worst relative defects of the discrete-calculus identities over random
/// fields (each defect is |lhs - rhs| / (scale + 1)).
struct IdentityReport {
  GridSpec grid;
  std::size_t trials = 0;
  double summation_by_parts = 0.0;
  double telescoping = 0.0;
  double axis_identity = 0.0;
  double norm_identity = 0.0;
  /// min over trials of sqrt(lhs) - d2 and sqrt(2) d2 - sqrt(lhs), relative;
  /// non-negative when the norm sandwich holds.
  double sandwich_margin = 0.0;

  double worst() const;
  bool passed(double tol = 1e-12) const { return worst() <= tol && sandwich_margin >= -tol; }
  std::string describe() const;
};

/// With `zero_fields` every trial uses the zero field and zero sequences.
IdentityReport identity_suite(const GridSpec& grid, std::size_t trials, std::uint64_t seed = 0,
                              bool zero_fields = false);

}  // namespace shsplit::verify

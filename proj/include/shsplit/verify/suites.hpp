#pragma once

// Named verification suites behind the `verify` subcommand.

#include <string>
#include <vector>

namespace shsplit::verify {

enum class VerifyLevel { quick, full };
enum class Fault { none, broken_reflection };

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::vector<std::string> details;  ///< one line per check, prefixed PASS/FAIL
  double seconds = 0.0;
};

/// identities, oracle, spd, gradients, convexity
const std::vector<std::string>& suite_names();

/// Runs the selected suites (all when `selection` holds "all"). Throws
/// std::invalid_argument for an empty selection or an unknown name.
/// `fault` swaps the production implicit operator for a deliberately broken one.
std::vector<SuiteResult> run_suites(VerifyLevel level, const std::vector<std::string>& selection,
                                    Fault fault = Fault::none);

}  // namespace shsplit::verify

#include "shsplit/verify/identities.hpp"

#include "shsplit/verify/random_fields.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace shsplit::verify {

double IdentityReport::worst() const {
  return std::max({summation_by_parts, telescoping, axis_identity, norm_identity});
}

std::string IdentityReport::describe() const {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << grid.nx() << "x" << grid.ny() << "x" << grid.nz() << " trials=" << trials
     << " sbp=" << summation_by_parts << " telescoping=" << telescoping << " axis=" << axis_identity
     << " norm=" << norm_identity << " sandwich_margin=" << sandwich_margin;
  return os.str();
}

IdentityReport identity_suite(const GridSpec& grid, std::size_t trials, std::uint64_t seed, bool zero_fields) {
  if (trials == 0) throw std::invalid_argument("identity_suite: trials must be >= 1");
  Rng rng(seed);
  std::uniform_int_distribution<int> seq_len(1, 16);
  IdentityReport rep;
  rep.grid = grid;
  rep.trials = trials;
  rep.sandwich_margin = std::numeric_limits<double>::infinity();
  const double amp = zero_fields ? 0.0 : 1.0;

  for (std::size_t t = 0; t < trials; ++t) {
    const FieldD f = uniform_noise(grid, rng, amp);
    const FieldD g = uniform_noise(grid, rng, amp);
    const auto ef = extend(f);

    const double sbp_scale = l2_norm(f) * l2_norm(laplacian(extend(g))) + 1.0;
    rep.summation_by_parts = std::max(rep.summation_by_parts, summation_by_parts_defect(f, g) / sbp_scale);

    const auto seq = uniform_sequence(static_cast<std::size_t>(seq_len(rng)) + 2, rng, amp);
    const auto tel = telescoping_sides<double>(seq);
    double seq_scale = 1.0;
    for (double x : seq) seq_scale = std::max(seq_scale, std::abs(x) + 1.0);
    rep.telescoping = std::max(rep.telescoping, std::abs(tel.lhs - tel.rhs) / seq_scale);

    for (Axis a : kAxes) {
      const auto s = laplacian_axis_identity(ef, a);
      rep.axis_identity =
          std::max(rep.axis_identity, std::abs(s.lhs - s.rhs) / (std::max(std::abs(s.lhs), std::abs(s.rhs)) + 1.0));
    }

    const auto n = laplacian_norm_identity(ef);
    rep.norm_identity = std::max(rep.norm_identity, std::abs(n.lhs - n.rhs) / (std::max(n.lhs, n.rhs) + 1.0));
    const double lap_norm = std::sqrt(n.lhs);
    const double scale = lap_norm + 1.0;
    rep.sandwich_margin =
        std::min({rep.sandwich_margin, (lap_norm - n.d2_norm) / scale, (std::sqrt(2.0) * n.d2_norm - lap_norm) / scale});
  }
  return rep;
}

}  // namespace shsplit::verify

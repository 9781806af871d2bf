#include "shsplit/verify/random_fields.hpp"

#include <cmath>
#include <numbers>

namespace shsplit::verify {
namespace {

FieldD smooth_axis(const FieldD& f, Axis axis) {
  const GridSpec& g = f.grid();
  const int n = g.intervals(axis);
  FieldD out(g);
  for (int k = 0; k <= g.nz(); ++k)
    for (int j = 0; j <= g.ny(); ++j)
      for (int i = 0; i <= g.nx(); ++i) {
        std::array<int, 3> lo{i, j, k}, hi{i, j, k};
        const int a = static_cast<int>(axis);
        lo[a] = reflect_index(lo[a] - 1, n);
        hi[a] = reflect_index(hi[a] + 1, n);
        out(i, j, k) = 0.25 * f(lo[0], lo[1], lo[2]) + 0.5 * f(i, j, k) + 0.25 * f(hi[0], hi[1], hi[2]);
      }
  return out;
}

}  // namespace

FieldD uniform_noise(const GridSpec& grid, Rng& rng, double amplitude) {
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  FieldD f(grid);
  for (std::size_t n = 0; n < f.size(); ++n) f[n] = dist(rng);
  return f;
}

FieldD filtered_noise(const GridSpec& grid, Rng& rng, double linf) {
  FieldD f = uniform_noise(grid, rng);
  for (Axis a : kAxes) f = smooth_axis(f, a);
  const double peak = linf_norm(f);
  if (peak > 0.0) f *= linf / peak;
  return f;
}

FieldD cosine_mode(const GridSpec& grid, int mx, int my, int mz, double amplitude) {
  constexpr double pi = std::numbers::pi;
  return FieldD::from_function(grid, [&](int i, int j, int k) {
    return amplitude * std::cos(pi * mx * i / grid.nx()) * std::cos(pi * my * j / grid.ny()) *
           std::cos(pi * mz * k / grid.nz());
  });
}

std::vector<double> uniform_sequence(std::size_t n, Rng& rng, double amplitude) {
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

}  // namespace shsplit::verify

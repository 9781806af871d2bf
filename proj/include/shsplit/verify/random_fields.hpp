#pragma once

#include "shsplit/lattice.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace shsplit::verify {

using Rng = std::mt19937_64;

/// Independent uniform values in [-amplitude, amplitude] at every node.
FieldD uniform_noise(const GridSpec& grid, Rng& rng, double amplitude = 1.0);

/// Uniform noise smoothed by a (1/4, 1/2, 1/4) pass along each axis (reflected
/// at the faces), rescaled so that the max-norm equals `linf`.
FieldD filtered_noise(const GridSpec& grid, Rng& rng, double linf = 1.0);

/// Product of cosines cos(pi m_a x_a / l_a) with integer mode numbers.
FieldD cosine_mode(const GridSpec& grid, int mx, int my, int mz, double amplitude = 1.0);

std::vector<double> uniform_sequence(std::size_t n, Rng& rng, double amplitude = 1.0);

}  // namespace shsplit::verify

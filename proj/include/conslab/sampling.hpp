#pragma once

#include <cstdint>
#include <string>

#include "conslab/fields.hpp"

namespace conslab {

enum class Family { random, bubble, dipole };

Family parse_family(const std::string& name);  // throws on unknown names
std::string family_name(Family f);

// Deterministic stream for (seed, index); independent of the grid so the same
// sample can be evaluated at every resolution.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

// Truncated Fourier series on [-1,1]^2 with |k|,|l| <= modes and coefficient
// decay 1/(1+k^2+l^2).
ScalarField band_limited(GridPtr g, std::uint64_t seed, int modes = 4);

// band_limited scaled to O(1) and rounded to the dyadic lattice 2^-24.
// On grids with n = 2^k + 1 every stencil operation on such values is exact.
ScalarField quantized_band_limited(GridPtr g, std::uint64_t seed, int modes = 4);

struct SamplePair {
  ScalarField a, b;
};

// random: two independent band-limited fields.
// bubble: the first two components of a stereographic bubble of scale
//   lambda = 0.5 (index + 1).
// dipole: opposite-sign Gaussian bumps with seeded centres.
SamplePair sample_pair(GridPtr g, Family f, std::uint64_t seed, int index);

}  // namespace conslab

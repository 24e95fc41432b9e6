#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "fbl/space.hpp"

namespace fbl {

using Rng = std::mt19937_64;

/// Standard normal vector.
Vec gaussian_vector(int n, Rng& rng);

/// Random point of the dual unit sphere S_{E*}. Directions alternate between
/// Gaussian and uniform-cube draws so that flat faces and corners of
/// polyhedral spheres both get visited.
Vec random_dual_sphere_point(const Space& space, Rng& rng);

/// Random point of the primal unit sphere S_E.
Vec random_primal_sphere_point(const Space& space, Rng& rng);

/// Random point of the primal unit ball B_E (sphere point times U[0,1]).
Vec random_primal_ball_point(const Space& space, Rng& rng);

/// Seeded validation set: `count` dual-sphere points followed by the
/// 2n functionals +-e_i.
std::vector<Vec> validation_sample(const Space& space, std::size_t count, std::uint64_t seed);

}  // namespace fbl

#pragma once

#include <cstdint>
#include <vector>

#include "fbl/space.hpp"

namespace fbl {

struct NetOptions {
  /// Random dual-sphere points used to confirm coverage after construction.
  std::size_t verify_samples = 10000;
  std::uint64_t seed = 0x6e6574;
  /// Refuse to build nets larger than this.
  std::size_t max_points = 2000000;
};

struct CoverageCheck {
  double worst_distance = 0.0;  // max over samples of the distance to the net
  std::size_t samples = 0;
  bool covered = false;
};

/**
 * Points y_1*, ..., y_N* on the dual unit sphere such that every point of
 * S_{E*} lies within dual-norm distance delta of some y_i*.
 *
 * Constructions: the two points of a one-dimensional sphere; face grids of
 * spacing <= 2 delta on the (weighted) cube when E is (weighted) l_1;
 * equally spaced angles for l_2^2; otherwise the radial projection of a
 * cube-surface grid whose spacing is chosen from the norm-equivalence
 * constants so that coverage is guaranteed. The result is then checked on
 * `options.verify_samples` random sphere points; a failed check throws
 * ComputationError.
 */
std::vector<Vec> sphere_net(const Space& space, double delta, const NetOptions& options = {});

/// Sampled coverage check of an arbitrary net.
CoverageCheck verify_net(const Space& space, const std::vector<Vec>& net, double delta,
                         std::size_t samples, std::uint64_t seed);

}  // namespace fbl

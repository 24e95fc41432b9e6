#pragma once

#include <cstdint>
#include <string>

#include "fbl/space.hpp"

namespace fbl {

enum class Exactness { kExact, kHeuristic };

const char* to_string(Exactness e);

struct SummingValue {
  double value = 0.0;
  Exactness exactness = Exactness::kExact;
  std::string method;  // "extreme-points", "arrangement", "sign-enumeration", "spectral", "ascent"
};

struct SummingOptions {
  /// Largest tuple size for exact sign enumeration when p = 1.
  int k_exact = 16;
  /// Multi-start conditional-gradient ascent for the heuristic fallback.
  int ascent_starts = 16;
  int ascent_iters = 200;
  std::uint64_t seed = 0x5eed;
};

/**
 * sup_{x in B_E} sum_i |<x_i*, x>|^p for the functionals stored as the
 * columns of `tuple` (n x k).
 *
 * Exact routes, in order of preference: maximum over the extreme points of
 * B_E when the ball is a polytope (any p); for p = 1 the largest
 * ||sum eps_i x_i*||_{E*} over the sign patterns realized by directions
 * (dim <= 3 and k >= 4), or over all patterns when k <= k_exact; the top
 * eigenvalue of sum x_i* x_i*^T for l_2 with p = 2. Anything else falls
 * back to multi-start conditional-gradient ascent over B_E, which returns
 * an attained (lower) value flagged as heuristic.
 */
SummingValue summing_constraint(const Space& space, const Eigen::MatrixXd& tuple, double p,
                                const SummingOptions& options = {});

/// True when summing_constraint would take an exact route.
bool summing_is_exact(const Space& space, int k, double p, const SummingOptions& options = {});

}  // namespace fbl

#pragma once

#include <cstdint>

#include "fbl/homfn.hpp"
#include "fbl/space.hpp"

namespace fbl {

struct OracleOptions {
  /// Refuse (ComputationError) when more tuples than this would be scored.
  double max_evals = 5e7;
  /// Also scale the second and later members by t in {eta, 2 eta, ..., 1}.
  bool radial_grid = true;
};

/**
 * Brute-force lower bound of ||f||_{FBL_k^{(p)}}: the best certificate
 * value over all k-tuples drawn with repetition from sphere_net(space, eta),
 * scored with the exact summing constraint. Only meant for n <= 3, k <= 3.
 *
 * The first member keeps norm one (the value is scale free); the others
 * range over the net times the radial grid unless that is switched off.
 */
double oracle_norm_net(const Space& space, const HomFn& f, double p, int k, double eta,
                       const OracleOptions& options = {});

}  // namespace fbl

#pragma once

#include <vector>

#include "fbl/fbl_norm.hpp"

namespace fbl {

/**
 * A sub-certificate {mu_k x_k* : k in sigma} of a normalized certificate
 * (x_k*) with a = sum_k |f(x_k*)| and weights w_k = |f(x_k*)| / a:
 *
 *   |sigma| <= target,
 *   sup_{x in B_E} sum_{k in sigma} mu_k |x_k*(x)| = 1 / C,
 *   sum_{k in sigma} w_k mu_k >= C.
 *
 * For a fixed sigma the best C is sqrt(R) with R the value of the linear
 * program max { sum w_k mu_k : sum mu_k |x_k*(x)| <= 1 on B_E, mu >= 0 }.
 */
struct SparsifiedCertificate {
  std::vector<int> sigma;  // increasing indices into parent.tuple
  Vec mu;                  // one entry per element of sigma, >= 0
  Certificate parent;
  /// The constant that was certified (largest grid point <= sqrt(R)).
  double C = 0.0;
  /// LP value for sigma; sqrt(R) is the best constant this sigma allows.
  double R = 0.0;
  /// sum_{k in sigma} |f(C mu_k x_k*)|, a value of a feasible |sigma|-tuple;
  /// at least C^2 a.
  double achieved_value = 0.0;
  /// sup_{x in B_E} sum mu_k |x_k*(x)| as recomputed after the search.
  double constraint = 0.0;
};

/**
 * Searches for sigma by greedy seeding with the largest weights followed by
 * pairwise exchanges (first improvement, lowest indices first), solving the
 * LP for mu at each candidate sigma. Returns the witness for the largest C
 * in `C_grid` that sqrt(R) reaches; an empty grid certifies C = sqrt(R).
 *
 * p = 1 only. Throws ComputationError when no grid point is reached; the
 * message carries the best sqrt(R).
 */
SparsifiedCertificate sparsify_certificate(const Space& space, const HomFn& f,
                                           const Certificate& cert, int target,
                                           const std::vector<double>& C_grid = {});

}  // namespace fbl

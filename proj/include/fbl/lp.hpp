#pragma once

#include <Eigen/Dense>

namespace fbl::lp {

enum class Status { kOptimal, kUnbounded, kIterationLimit };

struct Solution {
  Status status = Status::kOptimal;
  double objective = 0.0;
  Eigen::VectorXd x;     // primal solution
  Eigen::VectorXd dual;  // one multiplier per row, >= 0
  int iterations = 0;
};

/**
 * Dense tableau simplex for
 *
 *     maximize c'x  subject to  A x <= b,  x >= 0,
 *
 * with b >= 0, so the slack basis is a feasible start and no phase one is
 * needed. Every LP in this library is brought into this form (usually by
 * passing to the dual problem).
 *
 * Pivoting uses Dantzig's rule and switches to Bland's rule after a run of
 * degenerate pivots. `tol` is the feasibility / optimality tolerance.
 *
 * Throws ValidationError when shapes disagree or some b_i < 0.
 */
Solution maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                  const Eigen::VectorXd& c, double tol = 1e-9,
                  int max_iterations = 100000);

}  // namespace fbl::lp

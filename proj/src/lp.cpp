#include "fbl/lp.hpp"

#include <limits>
#include <vector>

#include <Eigen/LU>

#include "fbl/errors.hpp"

namespace fbl::lp {

namespace {

constexpr int kBlandAfterDegenerate = 50;

}  // namespace

Solution maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                  const Eigen::VectorXd& c, double tol, int max_iterations) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (b.size() != m || c.size() != n) {
    throw ValidationError("lp::maximize: shape mismatch");
  }
  if (m > 0 && b.minCoeff() < 0.0) {
    throw ValidationError("lp::maximize: right-hand side must be nonnegative");
  }

  // Columns: [0, n) structural, [n, n+m) slack, n+m right-hand side.
  const Eigen::Index rhs = n + m;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  T.topLeftCorner(m, n) = A;
  T.block(0, n, m, m).setIdentity();
  T.col(rhs).head(m) = b;
  T.row(m).head(n) = -c.transpose();

  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  Solution sol;
  int degenerate_run = 0;
  for (;;) {
    if (sol.iterations >= max_iterations) {
      sol.status = Status::kIterationLimit;
      break;
    }
    const bool bland = degenerate_run >= kBlandAfterDegenerate;

    Eigen::Index enter = -1;
    double best = -tol;
    for (Eigen::Index j = 0; j < n + m; ++j) {
      const double rc = T(m, j);
      if (rc < best) {
        enter = j;
        if (bland) break;
        best = rc;
      }
    }
    if (enter < 0) break;  // optimal

    Eigen::Index leave = -1;
    double ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double a = T(i, enter);
      if (a <= tol) continue;
      const double r = T(i, rhs) / a;
      if (r < ratio - 1e-12 ||
          (r <= ratio + 1e-12 && leave >= 0 &&
           basis[static_cast<std::size_t>(i)] <
               basis[static_cast<std::size_t>(leave)])) {
        ratio = std::min(ratio, r);
        leave = i;
      }
    }
    if (leave < 0) {
      sol.status = Status::kUnbounded;
      break;
    }
    degenerate_run = ratio <= tol ? degenerate_run + 1 : 0;

    const double pivot = T(leave, enter);
    T.row(leave) /= pivot;
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double factor = T(i, enter);
      if (factor != 0.0) T.row(i) -= factor * T.row(leave);
    }
    basis[static_cast<std::size_t>(leave)] = enter;
    ++sol.iterations;
  }

  sol.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index var = basis[static_cast<std::size_t>(i)];
    if (var < n) sol.x(var) = std::max(0.0, T(i, rhs));
  }
  sol.dual = T.row(m).segment(n, m).transpose().cwiseMax(0.0);
  sol.objective = T(m, rhs);

  // Recompute primal and dual from the final basis against the original
  // data; pivoting error builds up on long, ill-conditioned runs.
  if (sol.status == Status::kOptimal && m > 0) {
    Eigen::MatrixXd B(m, m);
    Eigen::VectorXd cB(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::Index var = basis[static_cast<std::size_t>(i)];
      B.col(i) = var < n ? Eigen::VectorXd(A.col(var)) : Eigen::VectorXd::Unit(m, var - n);
      cB(i) = var < n ? c(var) : 0.0;
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if (lu.isInvertible()) {
      const Eigen::VectorXd xB = lu.solve(b);
      const Eigen::VectorXd y = lu.transpose().solve(cB);
      if (xB.allFinite() && y.allFinite() && xB.minCoeff() > -1e-9) {
        sol.x.setZero();
        for (Eigen::Index i = 0; i < m; ++i) {
          const Eigen::Index var = basis[static_cast<std::size_t>(i)];
          if (var < n) sol.x(var) = std::max(0.0, xB(i));
        }
        sol.dual = y.cwiseMax(0.0);
        sol.objective = c.dot(sol.x);
      }
    }
  }
  return sol;
}

}  // namespace fbl::lp

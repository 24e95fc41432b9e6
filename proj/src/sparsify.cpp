#include "fbl/sparsify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fbl/errors.hpp"
#include "fbl/lp.hpp"

namespace fbl {

namespace {

constexpr int kMaxCuttingRounds = 200;

// Point x of B_E maximizing sum_k |<y_k, x>| for the columns y_k of Y, by
// sign enumeration (requires few columns).
Vec worst_point(const Space& space, const Eigen::MatrixXd& Y, double* value) {
  const int k = static_cast<int>(Y.cols());
  if (k > 24) throw ValidationError("sparsify: target too large for this space");
  Vec g = Y.rowwise().sum();
  Vec best_g = g;
  double best = space.dual_norm(g);
  for (std::uint64_t code = 1; code < (std::uint64_t{1} << (k - 1)); ++code) {
    const int bit = __builtin_ctzll(code) + 1;
    const bool negative = ((code ^ (code >> 1)) >> (bit - 1)) & 1U;
    g += (negative ? -2.0 : 2.0) * Y.col(bit);
    const double v = space.dual_norm(g);
    if (v > best) {
      best = v;
      best_g = g;
    }
  }
  *value = best;
  return space.norming_vector(best_g);
}

struct SigmaValue {
  double R = 0.0;
  Vec mu;
};

class SigmaSolver {
 public:
  SigmaSolver(const Space& space, const Eigen::MatrixXd& tuple, const Vec& w)
      : space_(space), tuple_(tuple), w_(w) {
    if (const auto& ext = space.extreme_points()) abs_pairings_ = (ext->transpose() * tuple).cwiseAbs();
  }

  SigmaValue solve(const std::vector<int>& sigma) const {
    const auto s = static_cast<Eigen::Index>(sigma.size());
    Vec c(s);
    Eigen::MatrixXd Y(tuple_.rows(), s);
    for (Eigen::Index j = 0; j < s; ++j) {
      c(j) = w_(sigma[static_cast<std::size_t>(j)]);
      Y.col(j) = tuple_.col(sigma[static_cast<std::size_t>(j)]);
    }
    if (abs_pairings_.size() > 0) {
      Eigen::MatrixXd A(abs_pairings_.rows(), s);
      for (Eigen::Index j = 0; j < s; ++j) A.col(j) = abs_pairings_.col(sigma[static_cast<std::size_t>(j)]);
      return finish(lp::maximize(A, Vec::Ones(A.rows()), c), c);
    }

    // Cutting planes: rows |<y_k, x>| for points x of B_E found so far.
    std::vector<Vec> rows;
    for (Eigen::Index j = 0; j < s; ++j) {
      const Vec x = space_.norming_vector(Y.col(j));
      rows.push_back((Y.transpose() * x).cwiseAbs());
    }
    SigmaValue out;
    for (int round = 0; round < kMaxCuttingRounds; ++round) {
      Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), s);
      for (std::size_t r = 0; r < rows.size(); ++r) A.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
      out = finish(lp::maximize(A, Vec::Ones(A.rows()), c), c);
      double S = 0.0;
      const Vec x = worst_point(space_, Y * out.mu.asDiagonal(), &S);
      if (S <= 1.0 + 1e-10) return out;
      rows.push_back((Y.transpose() * x).cwiseAbs());
      // The rescaled point is feasible; keep it if this is the last round.
      out.mu /= S;
      out.R /= S;
    }
    return out;
  }

 private:
  static SigmaValue finish(const lp::Solution& sol, const Vec& c) {
    if (sol.status != lp::Status::kOptimal) throw ComputationError("sparsify: LP did not reach an optimum");
    const Vec mu = sol.x.cwiseMax(0.0);
    return {c.dot(mu), mu};
  }

  const Space& space_;
  const Eigen::MatrixXd& tuple_;
  const Vec& w_;
  Eigen::MatrixXd abs_pairings_;  // |<x_k*, e>| with rows = extreme points
};

double summing_of(const Space& space, const Eigen::MatrixXd& Y) {
  if (const auto& ext = space.extreme_points()) return (ext->transpose() * Y).cwiseAbs().rowwise().sum().maxCoeff();
  double S = 0.0;
  worst_point(space, Y, &S);
  return S;
}

}  // namespace

SparsifiedCertificate sparsify_certificate(const Space& space, const HomFn& f,
                                           const Certificate& cert, int target,
                                           const std::vector<double>& C_grid) {
  if (target < 1) throw ValidationError("sparsify: target must be positive");
  if (cert.p != 1.0) throw ValidationError("sparsify: only p = 1 certificates are supported");
  if (cert.tuple.rows() != space.dim() || f.dim() != space.dim()) throw ValidationError("sparsify: dimension mismatch");
  if (std::abs(cert.constraint - 1.0) > 1e-6) throw ValidationError("sparsify: certificate must be normalized");
  for (const double C : C_grid) {
    if (!(C > 0.0)) throw ValidationError("sparsify: grid values must be positive");
  }

  const int N = static_cast<int>(cert.tuple.cols());
  Vec w(N);
  for (int k = 0; k < N; ++k) w(k) = std::abs(f(cert.tuple.col(k)));
  const double a = w.sum();
  if (!(a > 0.0)) throw ComputationError("sparsify: certificate has zero objective");
  w /= a;

  std::vector<int> order(static_cast<std::size_t>(N));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return w(i) > w(j); });
  const int size = std::min(target, N);
  std::vector<int> sigma(order.begin(), order.begin() + size);
  std::sort(sigma.begin(), sigma.end());

  const SigmaSolver solver(space, cert.tuple, w);
  SigmaValue best = solver.solve(sigma);
  if (size < N) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t pos = 0; pos < sigma.size() && !improved; ++pos) {
        for (int j = 0; j < N && !improved; ++j) {
          if (std::binary_search(sigma.begin(), sigma.end(), j)) continue;
          std::vector<int> candidate = sigma;
          candidate[pos] = j;
          std::sort(candidate.begin(), candidate.end());
          SigmaValue v = solver.solve(candidate);
          if (v.R > best.R * (1.0 + 1e-12)) {
            sigma = std::move(candidate);
            best = std::move(v);
            improved = true;
          }
        }
      }
    }
  }

  const double root = std::sqrt(best.R);
  double C = root;
  if (!C_grid.empty()) {
    C = 0.0;
    for (const double g : C_grid) {
      if (g <= root * (1.0 + 1e-12) && g > C) C = g;
    }
    if (C == 0.0) {
      std::ostringstream msg;
      msg << "sparsify: no grid constant reached; best sqrt(R) = " << root;
      throw ComputationError(msg.str());
    }
  }

  SparsifiedCertificate out;
  out.sigma = sigma;
  out.parent = cert;
  out.R = best.R;
  out.C = C;
  out.mu = best.mu / C;  // constraint 1/C, sum w mu = R / C >= C
  Eigen::MatrixXd Y(space.dim(), static_cast<Eigen::Index>(sigma.size()));
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    Y.col(static_cast<Eigen::Index>(j)) = out.mu(static_cast<Eigen::Index>(j)) * cert.tuple.col(sigma[j]);
  }
  out.constraint = summing_of(space, Y);
  double achieved = 0.0;
  for (Eigen::Index j = 0; j < Y.cols(); ++j) achieved += std::abs(f(Vec(C * Y.col(j))));
  out.achieved_value = achieved;
  return out;
}

}  // namespace fbl

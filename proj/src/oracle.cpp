#include "fbl/oracle.hpp"

#include <cmath>

#include "fbl/errors.hpp"
#include "fbl/sphere_net.hpp"
#include "fbl/summing.hpp"

namespace fbl {

double oracle_norm_net(const Space& space, const HomFn& f, double p, int k, double eta,
                       const OracleOptions& options) {
  if (f.empty() || f.dim() != space.dim()) throw ValidationError("oracle: function/space dimension mismatch");
  if (k < 1) throw ValidationError("oracle: k must be positive");
  if (!(p >= 1.0) || std::isinf(p)) throw ValidationError("oracle: p must lie in [1, inf)");
  if (!(eta > 0.0 && eta <= 1.0)) throw ValidationError("oracle: eta must lie in (0, 1]");

  const std::vector<Vec> net = sphere_net(space, eta);
  std::vector<double> radii{1.0};
  if (options.radial_grid) {
    const int steps = static_cast<int>(std::ceil(1.0 / eta));
    radii.clear();
    for (int s = 1; s <= steps; ++s) radii.push_back(std::min(1.0, s * eta));
  }
  const std::size_t N = net.size();
  const std::size_t M = N * radii.size();
  const double evals = static_cast<double>(N) * std::pow(static_cast<double>(M), k - 1);
  if (evals > options.max_evals) {
    throw ComputationError("oracle: " + std::to_string(static_cast<long long>(evals)) +
                           " tuples exceed the evaluation budget");
  }

  std::vector<double> fv(N);
  for (std::size_t i = 0; i < N; ++i) fv[i] = std::pow(std::abs(f(net[i])), p);

  const auto& ext = space.extreme_points();
  Eigen::MatrixXd Q;  // |<y_i, e>|^p, one row per net point
  if (ext) {
    Eigen::MatrixXd Y(space.dim(), static_cast<Eigen::Index>(N));
    for (std::size_t i = 0; i < N; ++i) Y.col(static_cast<Eigen::Index>(i)) = net[i];
    Q = (Y.transpose() * *ext).array().abs().pow(p);
  }

  SummingOptions sopts;
  sopts.k_exact = std::max(16, k);
  double best = 0.0;
  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);  // idx[0] in [0,N), others in [0,M)
  Eigen::MatrixXd tuple(space.dim(), k);
  while (true) {
    double objective = fv[idx[0]];
    Eigen::RowVectorXd colsum;
    if (ext) colsum = Q.row(static_cast<Eigen::Index>(idx[0]));
    tuple.col(0) = net[idx[0]];
    for (int j = 1; j < k; ++j) {
      const std::size_t point = idx[j] / radii.size();
      const double r = radii[idx[j] % radii.size()];
      const double rp = std::pow(r, p);
      objective += rp * fv[point];
      if (ext) {
        colsum += rp * Q.row(static_cast<Eigen::Index>(point));
      } else {
        tuple.col(j) = r * net[point];
      }
    }
    const double constraint = ext ? colsum.maxCoeff() : summing_constraint(space, tuple, p, sopts).value;
    if (constraint > 0.0) best = std::max(best, std::pow(objective / constraint, 1.0 / p));

    int j = k - 1;
    for (; j >= 0; --j) {
      const std::size_t limit = j == 0 ? N : M;
      if (++idx[static_cast<std::size_t>(j)] < limit) break;
      idx[static_cast<std::size_t>(j)] = 0;
    }
    if (j < 0) break;
  }
  return best;
}

}  // namespace fbl

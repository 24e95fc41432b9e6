#pragma once

#include <Eigen/Dense>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fbl {

using Vec = Eigen::VectorXd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class NormKind { kPNorm, kWeightedL1, kPolytope, kDirectSum };

/**
 * A finite-dimensional normed space E = (R^n, ||.||).
 *
 * Vectors of E and functionals of E* are both plain coordinate vectors; the
 * pairing is the Euclidean dot product. Spaces are immutable values that
 * share their (precomputed) data, so copies are cheap and concurrent use
 * from several threads is safe.
 */
class Space {
 public:
  /// l_p^n for p in [1, inf] (pass kInfinity for the sup norm).
  static Space lp(int dim, double p);
  static Space l1(int dim) { return lp(dim, 1.0); }
  static Space l2(int dim) { return lp(dim, 2.0); }
  static Space linf(int dim) { return lp(dim, kInfinity); }

  /// ||x|| = sum_i w_i |x_i| with w_i > 0.
  static Space weighted_l1(Vec weights);

  /// Norm whose unit ball is the convex hull of `vertices` (one per column).
  /// The list must be origin-symmetric and span R^n.
  static Space polytope(Eigen::MatrixXd vertices);

  /// The l_p-sum of `parts`: ||(x_1, ..., x_m)|| = ||(||x_1||, ..., ||x_m||)||_p.
  static Space direct_sum(const std::vector<Space>& parts, double p);

  int dim() const;
  NormKind kind() const;
  /// Exponent of a p-norm or of a direct sum; 1 for the other kinds.
  double exponent() const;
  const Vec& weights() const;
  const Eigen::MatrixXd& vertices() const;
  const std::vector<Space>& components() const;

  /// Short human-readable descriptor, e.g. "l1:2", "wl1:[0.5,0.5]".
  std::string describe() const;

  double primal_norm(const Vec& x) const;
  double dual_norm(const Vec& f) const;

  /// Extreme points of B_E (columns) when there are finitely many and at
  /// most a few tens of thousands of them. Every convex function on B_E
  /// attains its maximum on this set.
  const std::optional<Eigen::MatrixXd>& extreme_points() const;

  /// Some x in B_E with <g, x> = ||g||_{E*}.
  Vec norming_vector(const Vec& g) const;

  /// True for l_1^n and weighted l_1: the spaces whose dual is an
  /// (weighted) l_inf and where maximal functions are the g_phi.
  bool is_l1_type() const;
  /// Weights w with ||x|| = sum w_i |x_i|; only valid when is_l1_type().
  Vec l1_weights() const;

  /// A lower bound c > 0 with c ||f||_inf <= ||f||_{E*} for every functional.
  double dual_vs_sup_lower() const;

  void check_dim(const Vec& v, const char* what) const;

 private:
  struct Data;
  explicit Space(std::shared_ptr<const Data> data);
  std::shared_ptr<const Data> data_;
};

}  // namespace fbl

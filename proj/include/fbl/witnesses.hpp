#pragma once

#include <string>
#include <vector>

#include "fbl/homfn.hpp"
#include "fbl/space.hpp"

namespace fbl {

/**
 * Level-m step functions of L_1[0,1] as weighted l_1 of dimension 2^m with
 * weights 2^-m (coordinate i is the value on the i-th dyadic interval).
 * A functional y* corresponds to the step function g = 2^m y*, so that
 * ||T* y*||_{L_1} = sum_i |y*_i|.
 */
class DyadicModel {
 public:
  explicit DyadicModel(int m);

  int level() const { return m_; }
  const Space& space() const { return space_; }
  /// Image of the indicator of I_{n,j} = [(j-1)/2^n, j/2^n], 1 <= j <= 2^n.
  Vec y(int n, int j) const;
  /// f_n = sum_j |delta_{y_{n,j}}| for 0 <= n <= m.
  const LatticeExpr& f(int n) const { return f_.at(static_cast<std::size_t>(n)); }
  /// The functional whose step function takes value values[j] on I_{n,j+1}.
  Vec block_functional(int n, const std::vector<double>& values) const;

 private:
  int m_;
  Space space_;
  std::vector<LatticeExpr> f_;
};

struct DyadicFamily {
  DyadicModel model;
  DirectedFamily family;  // f_1, ..., f_m
};

/// The increasing sequence f_1 <= ... <= f_m for 1 <= m <= 8.
DyadicFamily l1_dyadic_family(int m);

struct LimitCheck {
  int n = 0;                   // level at which y* is block constant
  std::vector<double> values;  // f_0(y*), ..., f_m(y*)
  double l1_norm = 0.0;        // ||T* y*||_{L_1}
  bool equal = false;          // f_n(y*) == ||T* y*|| exactly
  bool nondecreasing = false;  // f_0(y*) <= ... <= f_m(y*)
  bool limit_constant = false; // f_j(y*) == f_n(y*) for all j >= n
};

/// Throws ValidationError if y* is not constant on the level-n blocks.
LimitCheck l1_limit_check(const DyadicModel& model, const Vec& y_star, int n);

/**
 * Finite diagnostic for the summing basis s_n = e_1 + ... + e_n of c_0 in
 * R^N with the sup norm: the coordinatewise least upper bound is the
 * all-ones vector, whose tail profile t(j) = sup_{i >= j} |b_i| never
 * drops, so no upper bound lies in c_0 once N is allowed to grow.
 */
struct C0Report {
  int N = 0;
  std::vector<std::vector<double>> members;
  std::vector<double> member_norms;
  double sup_member_norm = 0.0;
  std::vector<double> least_upper_bound;
  double bound_norm = 0.0;
  std::vector<double> tail_profile;
  bool dominates = false;
  bool minimal = false;
  std::string note;
};

C0Report c0_summing_demo(int N);

}  // namespace fbl

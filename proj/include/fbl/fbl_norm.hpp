#pragma once

#include <cstdint>
#include <vector>

#include "fbl/homfn.hpp"
#include "fbl/space.hpp"
#include "fbl/summing.hpp"

namespace fbl {

/// Optimizer settings for the free-norm estimators. Results are a
/// deterministic function of these settings.
struct Budget {
  std::uint64_t seed = 0x2024;
  int starts = 64;
  /// Pattern-search sweeps per start.
  int iters = 2000;
  /// Largest tuple size for exact sign enumeration (p = 1, smooth balls).
  int k_exact = 16;
  /// A start stops once its relative step falls below this.
  double min_step = 1e-11;
  /// Worker threads for independent starts; 0 = hardware concurrency.
  int threads = 0;
};

/**
 * A tuple (x_1*, ..., x_k*) of functionals (columns of `tuple`) witnessing
 *
 *   ||f|| >= value = (sum_i |f(x_i*)|^p)^{1/p} / constraint^{1/p},
 *   constraint = sup_{x in B_E} sum_i |x_i*(x)|^p.
 *
 * value is invariant under scaling the whole tuple.
 */
struct Certificate {
  Eigen::MatrixXd tuple;
  double p = 1.0;
  double constraint = 0.0;
  double objective = 0.0;
  double value = 0.0;
  Exactness exactness = Exactness::kExact;

  /// The same certificate rescaled so that constraint = 1.
  Certificate normalized() const;
};

Certificate make_certificate(const Space& space, const HomFn& f, const Eigen::MatrixXd& tuple,
                             double p, int k_exact = 16);

struct NormEstimate {
  /// Lower bound of ||f||_{FBL_k^{(p)}} (certified when exactness is kExact).
  double value = 0.0;
  int k = 0;
  Certificate best;
  Exactness exactness = Exactness::kExact;
};

/**
 * Truncated free norm ||f||_{FBL_k^{(p)}[E]} from below.
 *
 * Maximizes the scale-free ratio value(tuple) by multi-start coordinate
 * pattern search. The search for k runs the stages 1, 2, ..., k in turn and
 * seeds each stage with the previous winner padded by a zero functional, so
 * the returned values are nondecreasing in k for a fixed budget.
 */
NormEstimate fbl_norm_k(const Space& space, const HomFn& f, double p, int k,
                        const Budget& budget = {});

struct FullNormEstimate {
  double value = 0.0;
  int k_used = 0;
  bool plateau = false;
  std::vector<NormEstimate> trace;  // one entry per k in the doubling schedule
};

/**
 * Escalates k = 1, 2, 4, ... up to `k_ceiling` until the relative increase
 * stays below `eps` for two consecutive doublings. Returns the plateau value
 * (a lower bound of ||f||_{FBL^{(p)}}) and the first k that reached it.
 * `plateau` is false when the ceiling was hit first.
 */
FullNormEstimate fbl_norm(const Space& space, const HomFn& f, double p, double eps,
                          const Budget& budget = {}, int k_ceiling = 16);

struct ProbeRow {
  int k = 0;
  double norm_k = 0.0;
  /// ||f||_{k_max} / ||f||_k.
  double ratio = 1.0;
};

/// Table of ||f||_{FBL_k} over an increasing list of k, with ratios to the
/// largest k. Runs one warm-started chain, so the column is nondecreasing.
std::vector<ProbeRow> lambda_probe(const Space& space, const HomFn& f,
                                   const std::vector<int>& k_list, double p = 1.0,
                                   const Budget& budget = {});

/// Estimates for several k along one warm-started chain (increasing ks).
std::vector<NormEstimate> fbl_norm_chain(const Space& space, const HomFn& f, double p,
                                         const std::vector<int>& ks, const Budget& budget = {});

}  // namespace fbl

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fbl/fbl_norm.hpp"
#include "fbl/homfn.hpp"
#include "fbl/space.hpp"

namespace fbl {

// ---------------------------------------------------------------------------
// Sphere-cover upper bounds

/// x* -> ||x*|| M clamp((2 delta - d(x*/||x*||, y*)) / delta, 0, 1), with d
/// the dual-norm distance. Equals M on the delta-cap around y*, vanishes
/// off the 2 delta-cap. Throws ValidationError unless ||y*|| = 1 +- 1e-9.
HomFn bump(const Space& space, const Vec& center, double delta, double M);

struct CoverOptions {
  /// Settings for the ||f||_k estimate that fixes delta.
  Budget budget;
  /// Use this value of ||f||_{FBL_k} instead of estimating it.
  std::optional<double> known_norm;
  std::size_t cap_samples = 200;
  std::size_t validation_samples = 10000;
  std::uint64_t seed = 0xc0fe;
  std::size_t max_net = 400000;
};

struct CoverReport {
  double f_norm_k = 0.0;
  double delta = 0.0;
  std::size_t net_size = 0;
  double lipschitz = 0.0;   // sampled Lipschitz constant of f on the sphere
  double max_margin = 0.0;  // largest safety margin added to a cap height
  double min_gap = 0.0;     // min of g - f on the validation set
  std::size_t validated = 0;
  bool dominates = false;
};

struct CoverResult {
  HomFn g;
  double delta_used = 0.0;
  CoverReport report;
};

/**
 * g = max_i bump(y_i*, delta, M_i) over a delta-net of S_{E*}, with M_i an
 * estimate from above of sup f on the 2 delta-cap of y_i* (sampled maximum
 * plus Lipschitz constant times the sampled fill distance).
 *
 * delta = eps ||f||_k / (k (4 ||f||_k + 1)), the largest value with
 * ||f||_k (4 k delta + 1) + k delta <= (1 + eps) ||f||_k (capped at 1).
 * Then f <= g and ||g||_k <= (1 + eps) ||f||_k, up to the cap estimates.
 *
 * f must be nonnegative on the validation set (ValidationError otherwise).
 * ||f||_k = 0 gives g = 0.
 */
CoverResult cover_upper_bound(const Space& space, const HomFn& f, int k, double eps,
                              const CoverOptions& options = {});

// ---------------------------------------------------------------------------
// Maximal functions on l_1(A)

/**
 * Absolutely summable coefficients (phi_a) and an exponent p. Either a
 * finite list or a countable stream a = 0, 1, 2, ... with a known tail sum.
 */
class PhiVector {
 public:
  PhiVector() = default;
  static PhiVector finite(std::vector<double> coeffs, double p = 1.0);
  /// `tail(n)` must return sum_{a >= n} |phi_a|.
  static PhiVector countable(std::function<double(std::size_t)> coeff,
                             std::function<double(std::size_t)> tail, double p, std::string name);
  /// phi_a = first * ratio^a with 0 <= ratio < 1.
  static PhiVector geometric(double first, double ratio, double p = 1.0);

  bool is_finite() const { return !coeff_; }
  double p() const { return p_; }
  /// Number of coefficients (finite vectors only).
  std::size_t size() const;
  const std::vector<double>& coeffs() const;
  double operator[](std::size_t a) const;
  double abs_sum() const { return tail(0); }
  /// sum_{a >= n} |phi_a|.
  double tail(std::size_t n) const;
  std::string describe() const;

 private:
  std::vector<double> finite_;
  std::function<double(std::size_t)> coeff_;
  std::function<double(std::size_t)> tail_;
  std::string name_;
  double p_ = 1.0;
};

/// g_phi(x*) = |sum_a phi_a |x*_a|^p|^{1/p} on l_inf^{|A|}; finite phi only.
HomFn g_phi(const PhiVector& phi);

/// ||g_phi||_{FBL^{(p)}[l_1(A)]} = (sum_a |phi_a|)^{1/p}.
double g_phi_norm(const PhiVector& phi);

struct Truncation {
  LatticeExpr f_S;
  /// (sum_{a not in S} |phi_a|)^{1/p}, a bound for ||g_phi - f_S||.
  double tail_bound = 0.0;
};

/// f_S = |sum_{a in S} phi_a |delta_{e_a}|^p|^{1/p} on coordinates
/// 0..dim-1 (dim = 0 picks max S + 1, or the size of a finite phi).
Truncation truncate_g_phi(const PhiVector& phi, const std::vector<std::size_t>& S,
                          int dim = 0);

struct MaximalOptions {
  std::size_t samples = 4096;
  /// Relative violation below which a boundary point counts as dominated.
  double tol = 1e-9;
  std::uint64_t seed = 0x3a7a;
  int max_rounds = 100;
  std::size_t validation_samples = 10000;
  /// g_phi >= h - dominance_tol on the validation set sets `dominates`.
  double dominance_tol = 1e-6;
};

struct MaximalReport {
  std::size_t constraints = 0;
  int rounds = 0;
  double phi_sum = 0.0;
  /// Largest ĥ^p / g_phi^p - 1 found by the last separation search.
  double max_violation = 0.0;
  double min_gap = 0.0;  // min of g - h on the validation set
  std::size_t validated = 0;
  bool dominates = false;
};

struct MaximalResult {
  /// Coefficients in the l_1 picture (for weighted l_1 after x_a -> w_a x_a).
  PhiVector phi;
  /// The majorant as a function on E* (a power-sum lattice expression).
  HomFn bound;
  /// (sum phi)^{1/p}.
  double bound_norm = 0.0;
  MaximalReport report;
};

/**
 * Smallest g_phi (phi >= 0, minimal sum) with g_phi >= h, by linear
 * programming over sampled boundary points b(u) = u / ĥ(u^{1/p})^p of
 * {u >= 0 : ĥ(u^{1/p}) > 1}. Here ĥ(v) = max over sign patterns of h(s v),
 * the largest function of |x*| below which g_phi has to stay above h.
 * Sampling is refined by cutting planes until no boundary point violates
 * the constraints by more than `tol`.
 *
 * E must be l_1^n or weighted l_1 (n <= 12). Throws ComputationError if
 * the linear program fails.
 */
MaximalResult maximal_majorant(const Space& space, const HomFn& h, double p,
                               const MaximalOptions& options = {});

// ---------------------------------------------------------------------------
// Strong Nakano reports

enum class NakanoMethod { kCover, kMaximal, kCoordinatewise };
const char* to_string(NakanoMethod m);
NakanoMethod parse_nakano_method(const std::string& s);

struct NakanoOptions {
  Budget budget;
  /// Slack of the cover construction.
  double eps = 0.1;
  CoverOptions cover;
  MaximalOptions maximal;
  FamilyOptions family;
};

struct NakanoReport {
  NakanoMethod method = NakanoMethod::kCover;
  std::vector<double> member_norms;
  double sup_member_norm = 0.0;
  HomFn upper_bound;  // empty for coordinatewise combinations
  double bound_norm = 0.0;
  /// bound_norm / sup_member_norm (1 when both vanish).
  double ratio = 1.0;
  double delta_used = 0.0;
  std::optional<PhiVector> phi;
  /// Whether bound_norm comes from a closed formula.
  bool bound_norm_exact = false;
  bool dominates = false;
  double min_gap = 0.0;
  std::vector<NakanoReport> components;
};

/**
 * Upper bound of an increasing family with the ratio of its norm to the
 * largest member norm. Member norms and cover-bound norms are FBL_k^{(p)}
 * estimates; the maximal method uses the exact g_phi norm. The maximal
 * method needs an l_1-type space; the cover method needs p = 1.
 */
NakanoReport strong_nakano_report(const Space& space, const DirectedFamily& family, double p,
                                  int k, NakanoMethod method, const NakanoOptions& options = {});

/**
 * The l_p-direct sum of lattices X_1 (+) ... (+) X_m: a family of tuples
 * (x_1^n, ..., x_m^n) has member norms ||(||x_i^n||)_i||_p, and the tuple of
 * component upper bounds is an upper bound with norm ||(||b_i||)_i||_p.
 * All parts must report the same number of members.
 */
NakanoReport direct_sum_report(const std::vector<NakanoReport>& parts, double p);

}  // namespace fbl

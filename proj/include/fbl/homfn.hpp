#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fbl/space.hpp"

namespace fbl {

class LatticeExpr;

/**
 * A positively homogeneous function on E*, f(t x*) = t f(x*) for t > 0.
 *
 * HomFn is a cheap shared handle to an immutable implementation: a lattice
 * expression, a bump supremum, a g_phi, a running maximum of a family, ...
 * Evaluation is const and thread-safe.
 */
class HomFn {
 public:
  class Impl {
   public:
    virtual ~Impl() = default;
    virtual int dim() const = 0;
    /// `x` is guaranteed to have size dim().
    virtual double eval(const Vec& x) const = 0;
    virtual std::string describe() const = 0;
    virtual const LatticeExpr* expr() const { return nullptr; }
  };

  HomFn() = default;
  explicit HomFn(std::shared_ptr<const Impl> impl);

  /// Wrap an arbitrary callable; the caller vouches for homogeneity.
  static HomFn from_function(int dim, std::function<double(const Vec&)> fn, std::string name);
  static HomFn zero(int dim);

  bool empty() const { return !impl_; }
  int dim() const;
  double operator()(const Vec& x) const;
  double eval_unchecked(const Vec& x) const { return impl_->eval(x); }
  std::string describe() const;

  /// The lattice expression behind this function, if it is one.
  std::optional<LatticeExpr> expr() const;

  /// x* -> c f(x*).
  HomFn scaled(double c) const;

 private:
  std::shared_ptr<const Impl> impl_;
};

/**
 * Element of the free vector lattice over E: a tree of evaluation
 * functionals delta_x combined by scaling, sums, |.|, joins and meets.
 * Trees are immutable and subtrees are shared.
 *
 * The extra PowerSum node |sum_a c_a |e_a|^p|^{1/p} is the p-convex
 * combination needed for truncations of g_phi when p > 1.
 */
class LatticeExpr {
 public:
  enum class Kind { kGenerator, kScale, kSum, kAbs, kJoin, kMeet, kPowerSum };

  static LatticeExpr generator(Vec x);
  static LatticeExpr scale(double c, LatticeExpr e);
  static LatticeExpr sum(LatticeExpr a, LatticeExpr b);
  static LatticeExpr abs(LatticeExpr e);
  static LatticeExpr join(LatticeExpr a, LatticeExpr b);
  static LatticeExpr meet(LatticeExpr a, LatticeExpr b);
  static LatticeExpr power_sum(double p, std::vector<double> coeffs, std::vector<LatticeExpr> terms);

  Kind kind() const;
  int dim() const;
  double eval(const Vec& x) const;  // unchecked size

  /// Generator vector (kGenerator only).
  const Vec& vector() const;
  /// Scale factor (kScale) or exponent (kPowerSum).
  double scalar() const;
  const std::vector<double>& coeffs() const;
  const std::vector<LatticeExpr>& children() const;

  /// Rendering in the prefix input syntax (`join(abs(delta [1,0]),...)`).
  std::string to_string() const;
  /// Depth of the tree; a generator has depth 0.
  int depth() const;

  HomFn fn() const;
  operator HomFn() const { return fn(); }

 private:
  struct Node;
  explicit LatticeExpr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

/// delta_x, with delta_x(x*) = <x*, x>.
LatticeExpr delta(const Space& space, const Vec& x);

inline LatticeExpr abs(const LatticeExpr& e) { return LatticeExpr::abs(e); }
inline LatticeExpr join(const LatticeExpr& a, const LatticeExpr& b) { return LatticeExpr::join(a, b); }
inline LatticeExpr meet(const LatticeExpr& a, const LatticeExpr& b) { return LatticeExpr::meet(a, b); }
inline LatticeExpr operator+(const LatticeExpr& a, const LatticeExpr& b) { return LatticeExpr::sum(a, b); }
inline LatticeExpr operator*(double c, const LatticeExpr& e) { return LatticeExpr::scale(c, e); }

struct FamilyOptions {
  std::size_t samples = 512;
  std::uint64_t seed = 0xfa3117;
  double tol = 1e-12;
};

/**
 * An increasing sequence f_1 <= f_2 <= ... of positively homogeneous
 * functions. Monotonicity is checked at construction on a seeded
 * validation set of dual-sphere points plus +-e_i (homogeneity makes the
 * sphere enough).
 */
class DirectedFamily {
 public:
  /// Throws ValidationError if some member fails to dominate its
  /// predecessor on the validation set.
  static DirectedFamily verified(const Space& space, std::vector<HomFn> members,
                                 const FamilyOptions& options = {});

  const std::vector<HomFn>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  const HomFn& operator[](std::size_t i) const { return members_[i]; }
  const HomFn& back() const { return members_.back(); }
  int dim() const { return members_.front().dim(); }

 private:
  explicit DirectedFamily(std::vector<HomFn> members) : members_(std::move(members)) {}
  std::vector<HomFn> members_;
};

/// Running joins y_n = a_1 v ... v a_n.
DirectedFamily directify(const Space& space, const std::vector<HomFn>& items,
                         const FamilyOptions& options = {});

/// g(x*) = max over the members; throws ValidationError if some member is
/// non-finite on the validation set.
HomFn pointwise_sup(const Space& space, const DirectedFamily& family,
                    const FamilyOptions& options = {});

/// Pointwise maximum of a nonempty list (a lattice expression when every
/// item is one).
HomFn join_all(const std::vector<HomFn>& items);

/**
 * Largest difference quotient |f(a) - f(b)| / ||a - b||_{E*} over seeded
 * pairs of dual-sphere points at several separations. A sampled estimate
 * of the Lipschitz constant of f on S_{E*}, not a bound.
 */
double sampled_lipschitz(const Space& space, const HomFn& f, std::size_t pairs = 2000,
                         std::uint64_t seed = 0x11f);

}  // namespace fbl

#include "fbl/homfn.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "fbl/errors.hpp"
#include "fbl/sampling.hpp"

namespace fbl {

namespace {

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class FunctionImpl final : public HomFn::Impl {
 public:
  FunctionImpl(int dim, std::function<double(const Vec&)> fn, std::string name)
      : dim_(dim), fn_(std::move(fn)), name_(std::move(name)) {}
  int dim() const override { return dim_; }
  double eval(const Vec& x) const override { return fn_(x); }
  std::string describe() const override { return name_; }

 private:
  int dim_;
  std::function<double(const Vec&)> fn_;
  std::string name_;
};

class ScaledImpl final : public HomFn::Impl {
 public:
  ScaledImpl(double c, HomFn f) : c_(c), f_(std::move(f)) {}
  int dim() const override { return f_.dim(); }
  double eval(const Vec& x) const override { return c_ * f_.eval_unchecked(x); }
  std::string describe() const override { return shortest(c_) + "*(" + f_.describe() + ")"; }

 private:
  double c_;
  HomFn f_;
};

class MaxImpl final : public HomFn::Impl {
 public:
  explicit MaxImpl(std::vector<HomFn> items) : items_(std::move(items)) {}
  int dim() const override { return items_.front().dim(); }
  double eval(const Vec& x) const override {
    double best = items_.front().eval_unchecked(x);
    for (std::size_t i = 1; i < items_.size(); ++i) best = std::max(best, items_[i].eval_unchecked(x));
    return best;
  }
  std::string describe() const override {
    std::string s = "max(";
    for (std::size_t i = 0; i < items_.size(); ++i) {
      if (i) s += ", ";
      s += items_[i].describe();
    }
    return s + ")";
  }

 private:
  std::vector<HomFn> items_;
};

}  // namespace

// ---------------------------------------------------------------- HomFn

HomFn::HomFn(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

HomFn HomFn::from_function(int dim, std::function<double(const Vec&)> fn, std::string name) {
  return HomFn(std::make_shared<FunctionImpl>(dim, std::move(fn), std::move(name)));
}

HomFn HomFn::zero(int dim) {
  return from_function(dim, [](const Vec&) { return 0.0; }, "0");
}

int HomFn::dim() const {
  if (!impl_) throw ValidationError("empty HomFn");
  return impl_->dim();
}

double HomFn::operator()(const Vec& x) const {
  if (!impl_) throw ValidationError("empty HomFn");
  if (x.size() != impl_->dim()) {
    std::ostringstream os;
    os << "eval: dimension mismatch (expected " << impl_->dim() << ", got " << x.size() << ")";
    throw ValidationError(os.str());
  }
  return impl_->eval(x);
}

std::string HomFn::describe() const { return impl_ ? impl_->describe() : "<empty>"; }

std::optional<LatticeExpr> HomFn::expr() const {
  if (!impl_) return std::nullopt;
  if (const auto* e = impl_->expr()) return *e;
  return std::nullopt;
}

HomFn HomFn::scaled(double c) const {
  if (auto e = expr()) return LatticeExpr::scale(c, *e).fn();
  return HomFn(std::make_shared<ScaledImpl>(c, *this));
}

// ---------------------------------------------------------- LatticeExpr

struct LatticeExpr::Node {
  Kind kind = Kind::kGenerator;
  int dim = 0;
  Vec x;
  double scalar = 0.0;
  std::vector<double> coeffs;
  std::vector<LatticeExpr> children;
};

namespace {

class ExprImpl final : public HomFn::Impl {
 public:
  explicit ExprImpl(LatticeExpr e) : e_(std::move(e)) {}
  int dim() const override { return e_.dim(); }
  double eval(const Vec& x) const override { return e_.eval(x); }
  std::string describe() const override { return e_.to_string(); }
  const LatticeExpr* expr() const override { return &e_; }

 private:
  LatticeExpr e_;
};

void require_same_dim(const LatticeExpr& a, const LatticeExpr& b) {
  if (a.dim() != b.dim()) throw ValidationError("lattice expression: operand dimensions differ");
}

}  // namespace

LatticeExpr::LatticeExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

LatticeExpr LatticeExpr::generator(Vec x) {
  if (x.size() < 1) throw ValidationError("delta: empty vector");
  if (!x.allFinite()) throw ValidationError("delta: non-finite coordinates");
  auto n = std::make_shared<Node>();
  n->kind = Kind::kGenerator;
  n->dim = static_cast<int>(x.size());
  n->x = std::move(x);
  return LatticeExpr(std::move(n));
}

LatticeExpr LatticeExpr::scale(double c, LatticeExpr e) {
  if (!std::isfinite(c)) throw ValidationError("scale: non-finite factor");
  auto n = std::make_shared<Node>();
  n->kind = Kind::kScale;
  n->dim = e.dim();
  n->scalar = c;
  n->children = {std::move(e)};
  return LatticeExpr(std::move(n));
}

namespace {

template <typename NodeT>
std::shared_ptr<NodeT> binary(LatticeExpr::Kind kind, LatticeExpr a, LatticeExpr b) {
  require_same_dim(a, b);
  auto n = std::make_shared<NodeT>();
  n->kind = kind;
  n->dim = a.dim();
  n->children = {std::move(a), std::move(b)};
  return n;
}

}  // namespace

LatticeExpr LatticeExpr::sum(LatticeExpr a, LatticeExpr b) {
  return LatticeExpr(binary<Node>(Kind::kSum, std::move(a), std::move(b)));
}
LatticeExpr LatticeExpr::join(LatticeExpr a, LatticeExpr b) {
  return LatticeExpr(binary<Node>(Kind::kJoin, std::move(a), std::move(b)));
}
LatticeExpr LatticeExpr::meet(LatticeExpr a, LatticeExpr b) {
  return LatticeExpr(binary<Node>(Kind::kMeet, std::move(a), std::move(b)));
}

LatticeExpr LatticeExpr::abs(LatticeExpr e) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kAbs;
  n->dim = e.dim();
  n->children = {std::move(e)};
  return LatticeExpr(std::move(n));
}

LatticeExpr LatticeExpr::power_sum(double p, std::vector<double> coeffs,
                                   std::vector<LatticeExpr> terms) {
  if (!(p >= 1.0) || std::isinf(p)) throw ValidationError("power_sum: p must lie in [1, inf)");
  if (terms.empty() || coeffs.size() != terms.size()) {
    throw ValidationError("power_sum: need one coefficient per term");
  }
  for (std::size_t i = 1; i < terms.size(); ++i) require_same_dim(terms[0], terms[i]);
  auto n = std::make_shared<Node>();
  n->kind = Kind::kPowerSum;
  n->dim = terms.front().dim();
  n->scalar = p;
  n->coeffs = std::move(coeffs);
  n->children = std::move(terms);
  return LatticeExpr(std::move(n));
}

LatticeExpr::Kind LatticeExpr::kind() const { return node_->kind; }
int LatticeExpr::dim() const { return node_->dim; }
const Vec& LatticeExpr::vector() const { return node_->x; }
double LatticeExpr::scalar() const { return node_->scalar; }
const std::vector<double>& LatticeExpr::coeffs() const { return node_->coeffs; }
const std::vector<LatticeExpr>& LatticeExpr::children() const { return node_->children; }

double LatticeExpr::eval(const Vec& x) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::kGenerator:
      return n.x.dot(x);
    case Kind::kScale:
      return n.scalar * n.children[0].eval(x);
    case Kind::kSum:
      return n.children[0].eval(x) + n.children[1].eval(x);
    case Kind::kAbs:
      return std::abs(n.children[0].eval(x));
    case Kind::kJoin:
      return std::max(n.children[0].eval(x), n.children[1].eval(x));
    case Kind::kMeet:
      return std::min(n.children[0].eval(x), n.children[1].eval(x));
    case Kind::kPowerSum: {
      double acc = 0.0;
      const double p = n.scalar;
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        const double v = std::abs(n.children[i].eval(x));
        acc += n.coeffs[i] * (p == 1.0 ? v : std::pow(v, p));
      }
      return p == 1.0 ? std::abs(acc) : std::pow(std::abs(acc), 1.0 / p);
    }
  }
  return 0.0;
}

std::string LatticeExpr::to_string() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::kGenerator: {
      std::string s = "delta [";
      for (Eigen::Index i = 0; i < n.x.size(); ++i) {
        if (i) s += ',';
        s += shortest(n.x(i));
      }
      return s + "]";
    }
    case Kind::kScale:
      return "scale(" + shortest(n.scalar) + "," + n.children[0].to_string() + ")";
    case Kind::kSum:
      return "add(" + n.children[0].to_string() + "," + n.children[1].to_string() + ")";
    case Kind::kAbs:
      return "abs(" + n.children[0].to_string() + ")";
    case Kind::kJoin:
      return "join(" + n.children[0].to_string() + "," + n.children[1].to_string() + ")";
    case Kind::kMeet:
      return "meet(" + n.children[0].to_string() + "," + n.children[1].to_string() + ")";
    case Kind::kPowerSum: {
      std::string s = "psum(" + shortest(n.scalar) + ",[";
      for (std::size_t i = 0; i < n.coeffs.size(); ++i) {
        if (i) s += ',';
        s += shortest(n.coeffs[i]);
      }
      s += "]";
      for (const auto& c : n.children) s += "," + c.to_string();
      return s + ")";
    }
  }
  return {};
}

int LatticeExpr::depth() const {
  int d = 0;
  for (const auto& c : node_->children) d = std::max(d, c.depth() + 1);
  return d;
}

HomFn LatticeExpr::fn() const { return HomFn(std::make_shared<ExprImpl>(*this)); }

LatticeExpr delta(const Space& space, const Vec& x) {
  space.check_dim(x, "delta");
  return LatticeExpr::generator(x);
}

// ------------------------------------------------------------- families

DirectedFamily DirectedFamily::verified(const Space& space, std::vector<HomFn> members,
                                        const FamilyOptions& options) {
  if (members.empty()) throw ValidationError("directed family: no members");
  for (const auto& m : members) {
    if (m.dim() != space.dim()) throw ValidationError("directed family: member dimension mismatch");
  }
  const auto sample = validation_sample(space, options.samples, options.seed);
  for (const auto& x : sample) {
    double prev = members.front().eval_unchecked(x);
    for (std::size_t i = 1; i < members.size(); ++i) {
      const double cur = members[i].eval_unchecked(x);
      if (cur < prev - options.tol * (1.0 + std::abs(prev))) {
        std::ostringstream os;
        os << "directed family: member " << i << " is not above member " << i - 1
           << " (" << cur << " < " << prev << ")";
        throw ValidationError(os.str());
      }
      prev = cur;
    }
  }
  return DirectedFamily(std::move(members));
}

HomFn join_all(const std::vector<HomFn>& items) {
  if (items.empty()) throw ValidationError("join_all: empty list");
  if (items.size() == 1) return items.front();
  bool all_expr = true;
  for (const auto& f : items) all_expr = all_expr && f.expr().has_value();
  if (all_expr) {
    LatticeExpr acc = *items.front().expr();
    for (std::size_t i = 1; i < items.size(); ++i) acc = LatticeExpr::join(acc, *items[i].expr());
    return acc.fn();
  }
  for (std::size_t i = 1; i < items.size(); ++i) {
    if (items[i].dim() != items[0].dim()) throw ValidationError("join_all: dimension mismatch");
  }
  return HomFn(std::make_shared<MaxImpl>(items));
}

DirectedFamily directify(const Space& space, const std::vector<HomFn>& items,
                         const FamilyOptions& options) {
  if (items.empty()) throw ValidationError("directify: empty list");
  std::vector<HomFn> running;
  running.reserve(items.size());
  running.push_back(items.front());
  for (std::size_t i = 1; i < items.size(); ++i) {
    running.push_back(join_all({running.back(), items[i]}));
  }
  return DirectedFamily::verified(space, std::move(running), options);
}

HomFn pointwise_sup(const Space& space, const DirectedFamily& family, const FamilyOptions& options) {
  if (family.dim() != space.dim()) throw ValidationError("pointwise_sup: dimension mismatch");
  const auto sample = validation_sample(space, options.samples, options.seed);
  for (const auto& f : family.members()) {
    for (const auto& x : sample) {
      if (!std::isfinite(f.eval_unchecked(x))) {
        throw ValidationError("pointwise_sup: family is unbounded on the validation sample");
      }
    }
  }
  return join_all(family.members());
}

double sampled_lipschitz(const Space& space, const HomFn& f, std::size_t pairs, std::uint64_t seed) {
  Rng rng(seed);
  constexpr double kRadii[] = {1.0, 0.3, 0.1, 0.03, 0.01};
  double best = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const Vec a = random_dual_sphere_point(space, rng);
    const double r = kRadii[i % std::size(kRadii)];
    Vec b = a + r * random_dual_sphere_point(space, rng);
    const double nb = space.dual_norm(b);
    if (nb < 1e-12) continue;
    b /= nb;
    const double dist = space.dual_norm(a - b);
    if (dist < 1e-12) continue;
    best = std::max(best, std::abs(f.eval_unchecked(a) - f.eval_unchecked(b)) / dist);
  }
  return best;
}

}  // namespace fbl

#include "fbl/nakano.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "fbl/errors.hpp"
#include "fbl/lp.hpp"
#include "fbl/sampling.hpp"
#include "fbl/sphere_net.hpp"

namespace fbl {

namespace {

double ramp(double d, double delta) { return std::clamp((2.0 * delta - d) / delta, 0.0, 1.0); }

class BumpImpl final : public HomFn::Impl {
 public:
  BumpImpl(Space space, Vec center, double delta, double M)
      : space_(std::move(space)), center_(std::move(center)), delta_(delta), M_(M) {}
  int dim() const override { return space_.dim(); }
  double eval(const Vec& x) const override {
    const double r = space_.dual_norm(x);
    if (r == 0.0) return 0.0;
    return r * M_ * ramp(space_.dual_norm(x / r - center_), delta_);
  }
  std::string describe() const override {
    std::ostringstream s;
    s << "bump(delta=" << delta_ << ", M=" << M_ << ")";
    return s.str();
  }

 private:
  Space space_;
  Vec center_;
  double delta_;
  double M_;
};

// Maximum of bumps of a common radius. Centers are bucketed on a grid of
// sup-norm cell size 2 delta / c, where c ||.||_inf <= ||.||_{E*}, so only
// the 3^n neighbouring cells can hold centers with a nonzero bump.
class CoverImpl final : public HomFn::Impl {
 public:
  CoverImpl(Space space, std::vector<Vec> centers, std::vector<double> heights, double delta)
      : space_(std::move(space)), centers_(std::move(centers)), heights_(std::move(heights)), delta_(delta) {
    const int n = space_.dim();
    use_grid_ = n <= 6 && centers_.size() > 16;
    cell_ = 2.0 * delta_ / space_.dual_vs_sup_lower();
    if (use_grid_) {
      for (std::size_t i = 0; i < centers_.size(); ++i) grid_[key(cell_of(centers_[i]))].push_back(i);
      int count = 1;
      for (int j = 0; j < n; ++j) count *= 3;
      for (int code = 0; code < count; ++code) {
        std::vector<long long> off(static_cast<std::size_t>(n));
        int c = code;
        for (int j = 0; j < n; ++j, c /= 3) off[static_cast<std::size_t>(j)] = c % 3 - 1;
        offsets_.push_back(std::move(off));
      }
    }
  }
  int dim() const override { return space_.dim(); }
  double eval(const Vec& x) const override {
    const double r = space_.dual_norm(x);
    if (r == 0.0) return 0.0;
    const Vec u = x / r;
    double best = 0.0;
    auto visit = [&](std::size_t i) {
      if (heights_[i] <= best) return;
      const double v = heights_[i] * ramp(space_.dual_norm(u - centers_[i]), delta_);
      best = std::max(best, v);
    };
    if (use_grid_) {
      const auto base = cell_of(u);
      std::vector<long long> probe(base.size());
      for (const auto& off : offsets_) {
        for (std::size_t j = 0; j < base.size(); ++j) probe[j] = base[j] + off[j];
        const auto it = grid_.find(key(probe));
        if (it == grid_.end()) continue;
        for (const std::size_t i : it->second) visit(i);
      }
    } else {
      for (std::size_t i = 0; i < centers_.size(); ++i) visit(i);
    }
    return r * best;
  }
  std::string describe() const override {
    std::ostringstream s;
    s << "cover(" << centers_.size() << " bumps, delta=" << delta_ << ")";
    return s.str();
  }

 private:
  std::vector<long long> cell_of(const Vec& u) const {
    std::vector<long long> c(static_cast<std::size_t>(u.size()));
    for (Eigen::Index j = 0; j < u.size(); ++j) c[static_cast<std::size_t>(j)] = static_cast<long long>(std::floor(u(j) / cell_));
    return c;
  }
  static std::uint64_t key(const std::vector<long long>& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const long long v : c) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }

  Space space_;
  std::vector<Vec> centers_;
  std::vector<double> heights_;
  double delta_;
  bool use_grid_ = false;
  double cell_ = 1.0;
  // Hash collisions only add candidates, which the distance test discards.
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid_;
  std::vector<std::vector<long long>> offsets_;
};

// Random points of the 2 delta-cap around y on the dual sphere.
std::vector<Vec> cap_points(const Space& space, const Vec& y, double delta, std::size_t count, Rng& rng) {
  std::vector<Vec> pts;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double dim = std::max(1, space.dim() - 1);
  for (std::size_t attempt = 0; pts.size() < count && attempt < 50 * count; ++attempt) {
    const double r = 2.0 * delta * std::pow(unit(rng), 1.0 / dim);
    const Vec z = y + r * random_dual_sphere_point(space, rng);
    const double nz = space.dual_norm(z);
    if (nz == 0.0) continue;
    Vec u = z / nz;
    if (space.dual_norm(u - y) <= 2.0 * delta) pts.push_back(std::move(u));
  }
  return pts;
}

void check_finite_p(double p, const char* what) {
  if (!(p >= 1.0) || std::isinf(p)) throw ValidationError(std::string(what) + ": p must lie in [1, inf)");
}

}  // namespace

HomFn bump(const Space& space, const Vec& center, double delta, double M) {
  space.check_dim(center, "bump center");
  if (std::abs(space.dual_norm(center) - 1.0) > 1e-9) throw ValidationError("bump: center must lie on the dual unit sphere");
  if (!(delta > 0.0)) throw ValidationError("bump: delta must be positive");
  if (!(M >= 0.0) || std::isinf(M)) throw ValidationError("bump: height must be finite and nonnegative");
  return HomFn(std::make_shared<BumpImpl>(space, center, delta, M));
}

CoverResult cover_upper_bound(const Space& space, const HomFn& f, int k, double eps,
                              const CoverOptions& options) {
  if (f.empty() || f.dim() != space.dim()) throw ValidationError("cover: function/space dimension mismatch");
  if (k < 1) throw ValidationError("cover: k must be positive");
  if (!(eps > 0.0)) throw ValidationError("cover: eps must be positive");

  const auto validation = validation_sample(space, options.validation_samples, options.seed);
  for (const Vec& x : validation) {
    if (f(x) < -1e-12) throw ValidationError("cover: f takes negative values; pass |f| explicitly");
  }

  CoverResult out;
  out.report.f_norm_k = options.known_norm ? *options.known_norm : fbl_norm_k(space, f, 1.0, k, options.budget).value;
  const double fk = out.report.f_norm_k;
  if (!(fk > 0.0)) {
    out.g = HomFn::zero(space.dim());
    out.report.validated = validation.size();
    out.report.dominates = true;
    return out;
  }

  const double delta = std::min(1.0, eps * fk / (k * (4.0 * fk + 1.0)));
  NetOptions net_opts;
  net_opts.seed = options.seed;
  net_opts.max_points = options.max_net;
  const std::vector<Vec> net = sphere_net(space, delta, net_opts);
  const double L = sampled_lipschitz(space, f, 2000, options.seed);

  std::vector<double> heights(net.size());
  double max_margin = 0.0;
  Rng rng(options.seed ^ 0x9a7ULL);
  for (std::size_t i = 0; i < net.size(); ++i) {
    std::vector<Vec> pts = cap_points(space, net[i], delta, options.cap_samples, rng);
    pts.push_back(net[i]);
    double top = 0.0;
    for (const Vec& u : pts) top = std::max(top, f(u));
    // Sampled fill distance of the cap points, probed with fresh cap points.
    const auto probes = cap_points(space, net[i], delta, std::max<std::size_t>(1, options.cap_samples / 2), rng);
    double fill = 0.0;
    for (const Vec& q : probes) {
      double nearest = kInfinity;
      for (const Vec& u : pts) nearest = std::min(nearest, space.dual_norm(q - u));
      fill = std::max(fill, nearest);
    }
    const double margin = L * fill;
    max_margin = std::max(max_margin, margin);
    heights[i] = top + margin;
  }

  out.g = HomFn(std::make_shared<CoverImpl>(space, net, std::move(heights), delta));
  out.delta_used = delta;
  out.report.delta = delta;
  out.report.net_size = net.size();
  out.report.lipschitz = L;
  out.report.max_margin = max_margin;
  double gap = kInfinity;
  for (const Vec& x : validation) gap = std::min(gap, out.g(x) - f(x));
  out.report.min_gap = gap;
  out.report.validated = validation.size();
  out.report.dominates = gap >= 0.0;
  return out;
}

// ---------------------------------------------------------------------------

PhiVector PhiVector::finite(std::vector<double> coeffs, double p) {
  check_finite_p(p, "phi");
  for (const double c : coeffs) {
    if (!std::isfinite(c)) throw ValidationError("phi: coefficients must be finite");
  }
  PhiVector v;
  v.finite_ = std::move(coeffs);
  v.p_ = p;
  return v;
}

PhiVector PhiVector::countable(std::function<double(std::size_t)> coeff,
                               std::function<double(std::size_t)> tail, double p, std::string name) {
  check_finite_p(p, "phi");
  if (!coeff || !tail) throw ValidationError("phi: countable vectors need a coefficient and a tail function");
  if (!std::isfinite(tail(0))) throw ValidationError("phi: coefficients are not summable");
  PhiVector v;
  v.coeff_ = std::move(coeff);
  v.tail_ = std::move(tail);
  v.name_ = std::move(name);
  v.p_ = p;
  return v;
}

PhiVector PhiVector::geometric(double first, double ratio, double p) {
  if (!(ratio >= 0.0 && ratio < 1.0)) throw ValidationError("phi: geometric ratio must lie in [0, 1)");
  std::ostringstream name;
  name << "geometric(" << first << ", " << ratio << ")";
  return countable([=](std::size_t a) { return first * std::pow(ratio, static_cast<double>(a)); },
                   [=](std::size_t n) { return std::abs(first) * std::pow(ratio, static_cast<double>(n)) / (1.0 - ratio); },
                   p, name.str());
}

std::size_t PhiVector::size() const {
  if (!is_finite()) throw ValidationError("phi: countable vector has no finite size");
  return finite_.size();
}

const std::vector<double>& PhiVector::coeffs() const {
  if (!is_finite()) throw ValidationError("phi: countable vector has no coefficient list");
  return finite_;
}

double PhiVector::operator[](std::size_t a) const {
  if (coeff_) return coeff_(a);
  return a < finite_.size() ? finite_[a] : 0.0;
}

double PhiVector::tail(std::size_t n) const {
  if (tail_) return tail_(n);
  double s = 0.0;
  for (std::size_t a = n; a < finite_.size(); ++a) s += std::abs(finite_[a]);
  return s;
}

std::string PhiVector::describe() const {
  if (!is_finite()) return name_;
  std::ostringstream s;
  s << "[";
  for (std::size_t a = 0; a < finite_.size(); ++a) s << (a ? "," : "") << finite_[a];
  s << "]";
  return s.str();
}

Truncation truncate_g_phi(const PhiVector& phi, const std::vector<std::size_t>& S, int dim) {
  if (S.empty()) throw ValidationError("truncate: empty index set");
  std::vector<std::size_t> idx = S;
  std::sort(idx.begin(), idx.end());
  if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) throw ValidationError("truncate: repeated index");
  if (phi.is_finite() && idx.back() >= phi.size()) throw ValidationError("truncate: index outside the support");
  if (dim == 0) dim = phi.is_finite() ? static_cast<int>(phi.size()) : static_cast<int>(idx.back() + 1);
  if (static_cast<std::size_t>(dim) <= idx.back()) throw ValidationError("truncate: dimension too small for the index set");

  std::vector<double> coeffs;
  std::vector<LatticeExpr> terms;
  double inside = 0.0;
  for (const std::size_t a : idx) {
    coeffs.push_back(phi[a]);
    terms.push_back(LatticeExpr::generator(Vec::Unit(dim, static_cast<Eigen::Index>(a))));
    inside += std::abs(phi[a]);
  }
  // Mass outside S: everything up to max S that is not in S, plus the tail.
  double outside = phi.tail(idx.back() + 1);
  const double below = phi.abs_sum() - phi.tail(idx.back() + 1);
  outside += std::max(0.0, below - inside);
  Truncation t{LatticeExpr::power_sum(phi.p(), std::move(coeffs), std::move(terms)),
               std::pow(outside, 1.0 / phi.p())};
  if (outside == 0.0) t.tail_bound = 0.0;
  return t;
}

HomFn g_phi(const PhiVector& phi) {
  if (!phi.is_finite()) throw ValidationError("g_phi: countable support; use truncate_g_phi");
  if (phi.size() == 0) throw ValidationError("g_phi: empty index set");
  std::vector<std::size_t> all(phi.size());
  for (std::size_t a = 0; a < all.size(); ++a) all[a] = a;
  return truncate_g_phi(phi, all).f_S.fn();
}

double g_phi_norm(const PhiVector& phi) { return std::pow(phi.abs_sum(), 1.0 / phi.p()); }

// ---------------------------------------------------------------------------

namespace {

// ĥ on u >= 0 in l_inf coordinates: max over sign patterns of h(w . s . u).
class SymmetrizedH {
 public:
  SymmetrizedH(const HomFn& h, Vec w) : h_(h), w_(std::move(w)) {}
  double operator()(const Vec& v) const {
    const int n = static_cast<int>(v.size());
    Vec x = w_.cwiseProduct(v);
    double best = h_.eval_unchecked(x);
    for (std::uint64_t code = 1; code < (std::uint64_t{1} << n); ++code) {
      const int bit = __builtin_ctzll(code);
      x(bit) = -x(bit);
      best = std::max(best, h_.eval_unchecked(x));
    }
    return best;
  }

 private:
  const HomFn& h_;
  Vec w_;
};

Vec root(const Vec& u, double p) {
  if (p == 1.0) return u;
  return u.array().pow(1.0 / p).matrix();
}

double powp(double v, double p) { return p == 1.0 ? v : std::pow(v, p); }

Vec random_direction(int n, Rng& rng, std::size_t i) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec u(n);
  switch (i % 3) {
    case 0:
      u = gaussian_vector(n, rng).cwiseAbs();
      break;
    case 1:
      for (int j = 0; j < n; ++j) u(j) = unit(rng);
      break;
    default:
      for (int j = 0; j < n; ++j) u(j) = unit(rng) < 0.5 ? 0.0 : unit(rng);
      break;
  }
  if (u.sum() == 0.0) u(static_cast<Eigen::Index>(i % static_cast<std::size_t>(n))) = 1.0;
  return u / u.sum();
}

struct Separation {
  const SymmetrizedH& hhat;
  double p;
  // ĥ(u^{1/p})^p / <phi, u>, the factor by which the constraint at u fails.
  double violation(const Vec& phi, const Vec& u) const {
    const double need = powp(hhat(root(u, p)), p);
    if (need <= 0.0) return 0.0;
    const double have = phi.dot(u);
    return have > 0.0 ? need / have : kInfinity;
  }
};

// Local maximization of the violation ratio over the simplex by coordinate
// pattern search.
Vec refine_violation(const Separation& sep, const Vec& phi, Vec u, double* value) {
  const int n = static_cast<int>(u.size());
  double cur = sep.violation(phi, u);
  for (double step = 0.25; step > 1e-9;) {
    bool improved = false;
    for (int j = 0; j < n; ++j) {
      for (const double sign : {1.0, -1.0}) {
        Vec v = u;
        v(j) = std::max(0.0, v(j) + sign * step);
        if (v.sum() <= 0.0) continue;
        v /= v.sum();
        const double val = sep.violation(phi, v);
        if (val > cur * (1.0 + 1e-14)) {
          u = std::move(v);
          cur = val;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  *value = cur;
  return u;
}

}  // namespace

MaximalResult maximal_majorant(const Space& space, const HomFn& h, double p, const MaximalOptions& options) {
  if (!space.is_l1_type()) throw ValidationError("maximal: the space must be l1 or weighted l1");
  if (h.empty() || h.dim() != space.dim()) throw ValidationError("maximal: function/space dimension mismatch");
  check_finite_p(p, "maximal");
  const int n = space.dim();
  if (n > 12) throw ValidationError("maximal: dimension above 12 is not supported");
  const Vec w = space.l1_weights();
  const SymmetrizedH hhat(h, w);
  const Separation sep{hhat, p};

  Rng rng(options.seed);
  std::vector<Vec> dirs;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    Vec u = Vec::Zero(n);
    for (int j = 0; j < n; ++j) {
      if (mask >> j & 1U) u(j) = 1.0;
    }
    dirs.push_back(u / u.sum());
  }
  for (std::size_t i = 0; i < options.samples; ++i) dirs.push_back(random_direction(n, rng, i));

  // Boundary rows b(u) = u / ĥ(u^{1/p})^p.
  std::vector<Vec> rows;
  auto add_row = [&](const Vec& u) {
    const double t = powp(hhat(root(u, p)), p);
    if (t > 0.0 && std::isfinite(t)) rows.push_back(u / t);
  };
  for (const Vec& u : dirs) add_row(u);

  MaximalResult out;
  Vec phi = Vec::Zero(n);
  if (rows.empty()) {
    out.phi = PhiVector::finite(std::vector<double>(static_cast<std::size_t>(n), 0.0), p);
  } else {
    for (int round = 0;; ++round) {
      // Dual of min{1'phi : B phi >= 1, phi >= 0}: max{1'y : B'y <= 1, y >= 0}.
      Eigen::MatrixXd At(n, static_cast<Eigen::Index>(rows.size()));
      for (std::size_t r = 0; r < rows.size(); ++r) At.col(static_cast<Eigen::Index>(r)) = rows[r];
      const auto sol = lp::maximize(At, Vec::Ones(n), Vec::Ones(At.cols()), 1e-11);
      if (sol.status != lp::Status::kOptimal) throw ComputationError("maximal: LP failed (primal infeasible)");
      phi = sol.dual.cwiseMax(0.0);
      out.report.rounds = round + 1;

      // Separation: worst fresh samples, polished by pattern search.
      std::vector<std::pair<double, Vec>> scored;
      for (std::size_t i = 0; i < 512; ++i) {
        Vec u = random_direction(n, rng, i);
        scored.emplace_back(sep.violation(phi, u), std::move(u));
      }
      for (const Vec& u : dirs) {
        if (scored.size() >= 512 + 64) break;
        scored.emplace_back(sep.violation(phi, u), u);
      }
      std::partial_sort(scored.begin(), scored.begin() + 4, scored.end(),
                        [](const auto& a, const auto& b) { return a.first > b.first; });
      double worst = 0.0;
      std::size_t added = 0;
      for (std::size_t s = 0; s < 4; ++s) {
        double v = 0.0;
        const Vec u = refine_violation(sep, phi, scored[s].second, &v);
        worst = std::max(worst, v - 1.0);
        if (v > 1.0 + options.tol) {
          add_row(u);
          ++added;
        }
      }
      out.report.max_violation = worst;
      if (added == 0 || round + 1 >= options.max_rounds) break;
    }
    std::vector<double> coeffs(phi.data(), phi.data() + n);
    out.phi = PhiVector::finite(std::move(coeffs), p);
  }

  // Majorant on E*: x* -> g_phi(x* / w).
  std::vector<double> c(static_cast<std::size_t>(n));
  std::vector<LatticeExpr> terms;
  for (int a = 0; a < n; ++a) {
    c[static_cast<std::size_t>(a)] = phi(a) / powp(w(a), p);
    terms.push_back(LatticeExpr::generator(Vec::Unit(n, a)));
  }
  out.bound = LatticeExpr::power_sum(p, std::move(c), std::move(terms)).fn();
  out.report.phi_sum = phi.sum();
  out.report.constraints = rows.size();
  out.bound_norm = g_phi_norm(out.phi);

  const auto validation = validation_sample(space, options.validation_samples, options.seed ^ 0x7a11ULL);
  double gap = kInfinity;
  for (const Vec& x : validation) gap = std::min(gap, out.bound(x) - h(x));
  out.report.min_gap = gap;
  out.report.validated = validation.size();
  out.report.dominates = gap >= -options.dominance_tol;
  return out;
}

// ---------------------------------------------------------------------------

const char* to_string(NakanoMethod m) {
  switch (m) {
    case NakanoMethod::kCover:
      return "cover";
    case NakanoMethod::kMaximal:
      return "maximal";
    case NakanoMethod::kCoordinatewise:
      return "coordinatewise";
  }
  return "?";
}

NakanoMethod parse_nakano_method(const std::string& s) {
  if (s == "cover") return NakanoMethod::kCover;
  if (s == "maximal") return NakanoMethod::kMaximal;
  if (s == "coordinatewise") return NakanoMethod::kCoordinatewise;
  throw ValidationError("unknown method '" + s + "' (expected cover or maximal)");
}

namespace {

double ratio_of(double bound, double sup) {
  if (sup > 0.0) return bound / sup;
  return bound > 0.0 ? kInfinity : 1.0;
}

}  // namespace

NakanoReport strong_nakano_report(const Space& space, const DirectedFamily& family, double p, int k,
                                  NakanoMethod method, const NakanoOptions& options) {
  if (family.dim() != space.dim()) throw ValidationError("nakano: family/space dimension mismatch");
  check_finite_p(p, "nakano");
  if (k < 1) throw ValidationError("nakano: k must be positive");
  if (method == NakanoMethod::kCoordinatewise) throw ValidationError("nakano: coordinatewise reports come from direct_sum_report");
  if (method == NakanoMethod::kMaximal && !space.is_l1_type()) {
    throw ValidationError("nakano: the maximal method needs an l1 or weighted l1 space");
  }
  if (method == NakanoMethod::kCover && p != 1.0) throw ValidationError("nakano: the cover method needs p = 1");

  // Re-verify monotonicity on this space's validation set.
  (void)DirectedFamily::verified(space, family.members(), options.family);
  const HomFn h = pointwise_sup(space, family, options.family);

  NakanoReport r;
  r.method = method;
  for (const HomFn& member : family.members()) {
    const double v = fbl_norm_k(space, member, p, k, options.budget).value;
    r.member_norms.push_back(v);
    r.sup_member_norm = std::max(r.sup_member_norm, v);
  }

  if (method == NakanoMethod::kCover) {
    CoverOptions copts = options.cover;
    copts.budget = options.budget;
    const double h_norm = fbl_norm_k(space, h, 1.0, k, options.budget).value;
    copts.known_norm = h_norm;
    const CoverResult cover = cover_upper_bound(space, h, k, options.eps, copts);
    r.upper_bound = cover.g;
    r.delta_used = cover.delta_used;
    r.bound_norm = h_norm > 0.0 ? fbl_norm_k(space, cover.g, 1.0, k, options.budget).value : 0.0;
    r.bound_norm_exact = h_norm == 0.0;
    r.dominates = cover.report.dominates;
    r.min_gap = cover.report.min_gap;
  } else {
    const MaximalResult m = maximal_majorant(space, h, p, options.maximal);
    r.upper_bound = m.bound;
    r.bound_norm = m.bound_norm;
    r.bound_norm_exact = true;
    r.phi = m.phi;
    r.dominates = m.report.dominates;
    r.min_gap = m.report.min_gap;
  }
  r.ratio = ratio_of(r.bound_norm, r.sup_member_norm);
  return r;
}

NakanoReport direct_sum_report(const std::vector<NakanoReport>& parts, double p) {
  if (parts.empty()) throw ValidationError("direct sum: no components");
  if (!(p >= 1.0)) throw ValidationError("direct sum: p must be at least 1");
  const std::size_t members = parts.front().member_norms.size();
  for (const auto& part : parts) {
    if (part.member_norms.size() != members) throw ValidationError("direct sum: components list different numbers of members");
  }
  auto combine = [p](const std::vector<double>& v) {
    if (std::isinf(p)) return *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (const double x : v) s += std::pow(x, p);
    return std::pow(s, 1.0 / p);
  };

  NakanoReport r;
  r.method = NakanoMethod::kCoordinatewise;
  r.components = parts;
  for (std::size_t n = 0; n < members; ++n) {
    std::vector<double> v;
    for (const auto& part : parts) v.push_back(part.member_norms[n]);
    r.member_norms.push_back(combine(v));
    r.sup_member_norm = std::max(r.sup_member_norm, r.member_norms.back());
  }
  std::vector<double> bounds;
  r.dominates = true;
  r.bound_norm_exact = true;
  r.min_gap = kInfinity;
  for (const auto& part : parts) {
    bounds.push_back(part.bound_norm);
    r.dominates = r.dominates && part.dominates;
    r.bound_norm_exact = r.bound_norm_exact && part.bound_norm_exact;
    r.min_gap = std::min(r.min_gap, part.min_gap);
  }
  r.bound_norm = combine(bounds);
  r.ratio = ratio_of(r.bound_norm, r.sup_member_norm);
  return r;
}

}  // namespace fbl

#include "fbl/fbl_norm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <mutex>
#include <thread>

#include "fbl/errors.hpp"
#include "fbl/sampling.hpp"
#include "fbl/sphere_net.hpp"

namespace fbl {

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double term(double v, double p) {
  const double a = std::abs(v);
  return p == 1.0 ? a : std::pow(a, p);
}

// Holds a tuple and the pieces of value^p = O / S so that replacing one
// functional costs one evaluation of f plus one column of the constraint.
class RatioObjective {
 public:
  RatioObjective(const Space& space, const HomFn& f, double p, int k, int k_exact)
      : space_(space), f_(f), p_(p), k_(k) {
    inner_.k_exact = k_exact;
    inner_.ascent_starts = k + 4;
    inner_.ascent_iters = 50;
    if (const auto& ext = space.extreme_points()) ext_ = &*ext;
  }

  void reset(const Eigen::MatrixXd& X) {
    X_ = X;
    terms_.resize(k_);
    for (int i = 0; i < k_; ++i) terms_(i) = term(f_.eval_unchecked(X_.col(i)), p_);
    O_ = terms_.sum();
    if (ext_) {
      Q_ = (X_.transpose() * *ext_).array().abs();
      if (p_ != 1.0) Q_ = Q_.array().pow(p_);
      colsum_ = Q_.colwise().sum();
      S_ = colsum_.maxCoeff();
    } else {
      S_ = summing_constraint(space_, X_, p_, inner_).value;
    }
  }

  double ratio() const { return ratio_of(O_, S_); }

  double trial(int i, const Vec& y) {
    pending_i_ = i;
    pending_y_ = y;
    const double fy = f_.eval_unchecked(y);
    if (!std::isfinite(fy)) throw ValidationError("fbl_norm: f is not finite on E*");
    pending_term_ = term(fy, p_);
    pending_O_ = O_ - terms_(i) + pending_term_;
    if (ext_) {
      pending_q_ = (y.transpose() * *ext_).array().abs();
      if (p_ != 1.0) pending_q_ = pending_q_.array().pow(p_);
      pending_S_ = (colsum_ - Q_.row(i) + pending_q_).maxCoeff();
    } else {
      Eigen::MatrixXd X = X_;
      X.col(i) = y;
      pending_S_ = summing_constraint(space_, X, p_, inner_).value;
    }
    return ratio_of(pending_O_, pending_S_);
  }

  // Whole-tuple replacement, evaluated from scratch.
  double trial_all(const Eigen::MatrixXd& Y) {
    pending_X_ = Y;
    double O = 0.0;
    for (int i = 0; i < k_; ++i) O += term(f_.eval_unchecked(Y.col(i)), p_);
    double S;
    if (ext_) {
      Eigen::MatrixXd Q = (Y.transpose() * *ext_).array().abs();
      if (p_ != 1.0) Q = Q.array().pow(p_);
      S = Q.colwise().sum().maxCoeff();
    } else {
      S = summing_constraint(space_, Y, p_, inner_).value;
    }
    return ratio_of(O, S);
  }

  void commit_all() { reset(pending_X_); }

  void commit() {
    X_.col(pending_i_) = pending_y_;
    terms_(pending_i_) = pending_term_;
    O_ = pending_O_;
    S_ = pending_S_;
    if (ext_) {
      colsum_ += pending_q_ - Q_.row(pending_i_);
      Q_.row(pending_i_) = pending_q_;
    }
  }

  // Rescale so that S = 1 and refresh the running sums.
  void renormalize() {
    if (S_ > 0.0) reset(X_ / std::pow(S_, 1.0 / p_));
  }

  const Eigen::MatrixXd& tuple() const { return X_; }

 private:
  static double ratio_of(double O, double S) { return S > 0.0 ? O / S : 0.0; }

  const Space& space_;
  const HomFn& f_;
  double p_;
  int k_;
  SummingOptions inner_;
  const Eigen::MatrixXd* ext_ = nullptr;

  Eigen::MatrixXd X_;
  Vec terms_;
  double O_ = 0.0;
  double S_ = 0.0;
  Eigen::MatrixXd Q_;
  Eigen::RowVectorXd colsum_;

  int pending_i_ = 0;
  Vec pending_y_;
  double pending_term_ = 0.0;
  double pending_O_ = 0.0;
  double pending_S_ = 0.0;
  Eigen::RowVectorXd pending_q_;
  Eigen::MatrixXd pending_X_;
};

constexpr int kJointDirections = 2;
constexpr std::size_t kPolished = 4;
constexpr int kPolishRounds = 4;

struct StageContext {
  const Space& space;
  const HomFn& f;
  double p;
  int k;
  const Budget& budget;
  Vec coord_scale;
  const std::vector<Vec>* net;
  const std::vector<Vec>* fine_net;
};

// Extra starts: the warm tuple plus one functional t y with y from the fine
// net and t on a radial grid, best ratios first. For k = 1 the net points
// themselves are scored.
std::vector<Eigen::MatrixXd> greedy_starts(const StageContext& ctx, const std::optional<Certificate>& warm,
                                           std::size_t count) {
  std::vector<Eigen::MatrixXd> out;
  const int prev = warm ? static_cast<int>(warm->tuple.cols()) : 0;
  if (!ctx.fine_net || count == 0 || prev + 1 != ctx.k) return out;
  RatioObjective obj(ctx.space, ctx.f, ctx.p, ctx.k, ctx.budget.k_exact);
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(ctx.space.dim(), ctx.k);
  if (warm) X.leftCols(prev) = warm->tuple;
  std::vector<double> scales = {1.0};
  if (warm) {
    for (int t = 1; t < 10; ++t) scales.push_back(0.1 * t);
  }
  std::vector<std::pair<double, Eigen::MatrixXd>> scored;
  for (const Vec& y : *ctx.fine_net) {
    for (const double t : scales) {
      X.col(ctx.k - 1) = t * y;
      obj.reset(X);
      scored.emplace_back(obj.ratio(), X);
    }
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; i < scored.size() && out.size() < count; ++i) out.push_back(std::move(scored[i].second));
  return out;
}

Eigen::MatrixXd random_start(const StageContext& ctx, Rng& rng, bool use_net) {
  const int n = ctx.space.dim();
  Eigen::MatrixXd X(n, ctx.k);
  std::uniform_real_distribution<double> magnitude(0.25, 1.0);
  for (int i = 0; i < ctx.k; ++i) {
    Vec col;
    if (use_net && ctx.net && !ctx.net->empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, ctx.net->size() - 1);
      col = (*ctx.net)[pick(rng)];
    } else {
      col = random_dual_sphere_point(ctx.space, rng);
    }
    X.col(i) = magnitude(rng) * col;
  }
  return X;
}

// Coordinate pattern search on one start, plus one random direction per
// functional and a few joint random directions per sweep (single-column
// moves stall where the constraint is attained at several extreme points).
// Returns the final tuple.
Eigen::MatrixXd pattern_search(const StageContext& ctx, RatioObjective& obj,
                               const Eigen::MatrixXd& X0, Rng& rng) {
  const int n = ctx.space.dim();
  obj.reset(X0);
  obj.renormalize();
  double current = obj.ratio();
  double step = 0.5;
  auto improves = [&](double v) { return current > 0.0 ? v > current * (1.0 + 1e-14) : v > 0.0; };

  for (int sweep = 0; sweep < ctx.budget.iters; ++sweep) {
    bool improved = false;
    for (int i = 0; i < ctx.k; ++i) {
      for (int j = 0; j < n; ++j) {
        for (const double sign : {1.0, -1.0}) {
          Vec y = obj.tuple().col(i);
          y(j) += sign * step * ctx.coord_scale(j);
          const double v = obj.trial(i, y);
          if (improves(v)) {
            obj.commit();
            current = v;
            improved = true;
            break;
          }
        }
      }
      Vec d = gaussian_vector(n, rng);
      d /= d.lpNorm<Eigen::Infinity>();
      d = d.cwiseProduct(ctx.coord_scale);
      for (const double sign : {1.0, -1.0}) {
        const Vec y = obj.tuple().col(i) + sign * step * d;
        const double v = obj.trial(i, y);
        if (improves(v)) {
          obj.commit();
          current = v;
          improved = true;
          break;
        }
      }
    }
    if (ctx.k > 1) {
      for (int r = 0; r < kJointDirections; ++r) {
        Eigen::MatrixXd D(n, ctx.k);
        for (int i = 0; i < ctx.k; ++i) {
          Vec d = gaussian_vector(n, rng);
          D.col(i) = d.cwiseProduct(ctx.coord_scale) / d.lpNorm<Eigen::Infinity>();
        }
        for (const double sign : {1.0, -1.0}) {
          const double v = obj.trial_all(obj.tuple() + sign * step * D);
          if (improves(v)) {
            obj.commit_all();
            current = v;
            improved = true;
            break;
          }
        }
      }
    }
    if (improved) {
      obj.renormalize();
      current = obj.ratio();
    } else {
      step *= 0.5;
      if (step < ctx.budget.min_step) break;
    }
  }
  return obj.tuple();
}

NormEstimate solve_stage(const StageContext& ctx, const std::optional<Certificate>& warm) {
  const int n = ctx.space.dim();
  const int random_starts = std::max(1, ctx.budget.starts);
  const auto greedy = greedy_starts(ctx, warm, static_cast<std::size_t>(random_starts + 3) / 4);
  const int starts = random_starts + static_cast<int>(greedy.size());
  std::vector<Eigen::MatrixXd> finals(static_cast<std::size_t>(starts));

  auto run = [&](int s) {
    Rng rng(mix(mix(ctx.budget.seed, static_cast<std::uint64_t>(ctx.k)), static_cast<std::uint64_t>(s)));
    RatioObjective obj(ctx.space, ctx.f, ctx.p, ctx.k, ctx.budget.k_exact);
    Eigen::MatrixXd X0;
    if (s >= random_starts) {
      X0 = greedy[static_cast<std::size_t>(s - random_starts)];
    } else if (s == 0 && warm) {
      X0 = Eigen::MatrixXd::Zero(n, ctx.k);
      X0.leftCols(warm->tuple.cols()) = warm->tuple;
    } else {
      X0 = random_start(ctx, rng, s % 2 == 1);
    }
    finals[static_cast<std::size_t>(s)] = pattern_search(ctx, obj, X0, rng);
  };

  int threads = ctx.budget.threads > 0 ? ctx.budget.threads
                                       : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, starts);
  if (threads == 1) {
    for (int s = 0; s < starts; ++s) run(s);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (int s = next++; s < starts; s = next++) {
          try {
            run(s);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  // Merge by certificate value; the warm start wins ties, then lowest index.
  std::optional<Certificate> best;
  if (warm) {
    Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(n, ctx.k);
    padded.leftCols(warm->tuple.cols()) = warm->tuple;
    best = make_certificate(ctx.space, ctx.f, padded, ctx.p, ctx.budget.k_exact);
  }
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t s = 0; s < finals.size(); ++s) {
    Certificate c = make_certificate(ctx.space, ctx.f, finals[s], ctx.p, ctx.budget.k_exact);
    ranked.emplace_back(c.value, s);
    if (!best || c.value > best->value) best = std::move(c);
  }

  // Restart the leading finishers with a fresh step size; a restarted
  // search with new random directions often leaves a ridge.
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  RatioObjective obj(ctx.space, ctx.f, ctx.p, ctx.k, ctx.budget.k_exact);
  for (std::size_t r = 0; r < std::min<std::size_t>(kPolished, ranked.size()); ++r) {
    Eigen::MatrixXd X = finals[ranked[r].second];
    double value = ranked[r].first;
    for (int round = 0; round < kPolishRounds; ++round) {
      Rng rng(mix(mix(ctx.budget.seed, 0x9011500 + static_cast<std::uint64_t>(ctx.k)),
                  static_cast<std::uint64_t>(r * kPolishRounds + round)));
      X = pattern_search(ctx, obj, X, rng);
      Certificate c = make_certificate(ctx.space, ctx.f, X, ctx.p, ctx.budget.k_exact);
      const bool better = c.value > value * (1.0 + 1e-13);
      value = std::max(value, c.value);
      if (c.value > best->value) best = std::move(c);
      if (!better) break;
    }
  }

  NormEstimate est;
  est.k = ctx.k;
  est.best = best->normalized();
  est.value = best->value;
  est.exactness = best->exactness;
  return est;
}

}  // namespace

Certificate Certificate::normalized() const {
  Certificate c = *this;
  if (constraint > 0.0) {
    const double s = std::pow(constraint, 1.0 / p);
    c.tuple /= s;
    c.objective /= s;
    c.constraint = 1.0;
  }
  return c;
}

Certificate make_certificate(const Space& space, const HomFn& f, const Eigen::MatrixXd& tuple,
                             double p, int k_exact) {
  if (tuple.rows() != space.dim()) throw ValidationError("certificate: dimension mismatch");
  SummingOptions opts;
  opts.k_exact = k_exact;
  const auto s = summing_constraint(space, tuple, p, opts);
  Certificate c;
  c.tuple = tuple;
  c.p = p;
  c.constraint = s.value;
  c.exactness = s.exactness;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < tuple.cols(); ++i) acc += term(f(tuple.col(i)), p);
  c.objective = p == 1.0 ? acc : std::pow(acc, 1.0 / p);
  c.value = s.value > 0.0 ? c.objective / (p == 1.0 ? s.value : std::pow(s.value, 1.0 / p)) : 0.0;
  return c;
}

std::vector<NormEstimate> fbl_norm_chain(const Space& space, const HomFn& f, double p,
                                         const std::vector<int>& ks, const Budget& budget) {
  if (f.empty() || f.dim() != space.dim()) throw ValidationError("fbl_norm: function/space dimension mismatch");
  if (!(p >= 1.0) || std::isinf(p)) throw ValidationError("fbl_norm: p must lie in [1, inf)");
  if (ks.empty()) throw ValidationError("fbl_norm: empty k list");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 1) throw ValidationError("fbl_norm: k must be positive");
    if (i && ks[i] <= ks[i - 1]) throw ValidationError("fbl_norm: k list must be increasing");
  }

  std::vector<Vec> net, fine_net;
  if (space.dim() <= 3) {
    NetOptions opts;
    opts.verify_samples = 0;
    net = sphere_net(space, 0.5, opts);
    fine_net = sphere_net(space, space.dim() <= 2 ? 0.05 : 0.2, opts);
  }
  Vec coord_scale(space.dim());
  for (int j = 0; j < space.dim(); ++j) coord_scale(j) = 1.0 / space.dual_norm(Vec::Unit(space.dim(), j));

  std::vector<NormEstimate> out;
  std::optional<Certificate> warm;
  for (const int k : ks) {
    StageContext ctx{space, f, p, k, budget, coord_scale, net.empty() ? nullptr : &net,
                     fine_net.empty() ? nullptr : &fine_net};
    NormEstimate est = solve_stage(ctx, warm);
    warm = est.best;
    out.push_back(std::move(est));
  }
  return out;
}

NormEstimate fbl_norm_k(const Space& space, const HomFn& f, double p, int k, const Budget& budget) {
  if (k < 1) throw ValidationError("fbl_norm_k: k must be positive");
  std::vector<int> ks(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) ks[static_cast<std::size_t>(i)] = i + 1;
  return fbl_norm_chain(space, f, p, ks, budget).back();
}

FullNormEstimate fbl_norm(const Space& space, const HomFn& f, double p, double eps,
                          const Budget& budget, int k_ceiling) {
  if (!(eps > 0.0)) throw ValidationError("fbl_norm: eps must be positive");
  if (k_ceiling < 1) throw ValidationError("fbl_norm: k ceiling must be positive");
  std::vector<int> ks;
  for (int k = 1; k <= k_ceiling; k *= 2) ks.push_back(k);
  const auto chain = fbl_norm_chain(space, f, p, ks, budget);

  FullNormEstimate out;
  out.trace = chain;
  int flat_steps = 0;
  std::size_t plateau_start = 0;
  for (std::size_t i = 1; i < chain.size(); ++i) {
    const double prev = chain[i - 1].value;
    const double rel = prev > 0.0 ? (chain[i].value - prev) / prev : (chain[i].value > 0.0 ? kInfinity : 0.0);
    if (rel < eps) {
      if (flat_steps == 0) plateau_start = i - 1;
      if (++flat_steps >= 2) {
        out.plateau = true;
        break;
      }
    } else {
      flat_steps = 0;
    }
  }
  if (out.plateau) {
    out.k_used = chain[plateau_start].k;
    out.value = chain[plateau_start + 2].value;
  } else {
    out.k_used = chain.back().k;
    out.value = chain.back().value;
  }
  return out;
}

std::vector<ProbeRow> lambda_probe(const Space& space, const HomFn& f, const std::vector<int>& k_list,
                                   double p, const Budget& budget) {
  const auto chain = fbl_norm_chain(space, f, p, k_list, budget);
  const double top = chain.back().value;
  std::vector<ProbeRow> rows;
  for (const auto& est : chain) {
    ProbeRow r;
    r.k = est.k;
    r.norm_k = est.value;
    r.ratio = est.value > 0.0 ? top / est.value : (top > 0.0 ? kInfinity : 1.0);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace fbl

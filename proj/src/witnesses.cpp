#include "fbl/witnesses.hpp"

#include <algorithm>
#include <cmath>

#include "fbl/errors.hpp"

namespace fbl {

DyadicModel::DyadicModel(int m)
    : m_(m), space_(Space::weighted_l1(Vec::Constant(1 << std::clamp(m, 0, 8), std::ldexp(1.0, -m)))) {
  if (m < 1 || m > 8) throw ValidationError("dyadic model: level must lie in [1, 8]");
  for (int n = 0; n <= m; ++n) {
    LatticeExpr sum = abs(delta(space_, y(n, 1)));
    for (int j = 2; j <= (1 << n); ++j) sum = sum + abs(delta(space_, y(n, j)));
    f_.push_back(sum);
  }
}

Vec DyadicModel::y(int n, int j) const {
  if (n < 0 || n > m_ || j < 1 || j > (1 << n)) throw ValidationError("dyadic model: block index out of range");
  const int width = 1 << (m_ - n);
  Vec v = Vec::Zero(1 << m_);
  v.segment((j - 1) * width, width).setOnes();
  return v;
}

Vec DyadicModel::block_functional(int n, const std::vector<double>& values) const {
  if (n < 0 || n > m_) throw ValidationError("dyadic model: level out of range");
  if (values.size() != (std::size_t{1} << n)) throw ValidationError("dyadic model: expected 2^n block values");
  const int width = 1 << (m_ - n);
  Vec v(1 << m_);
  for (std::size_t j = 0; j < values.size(); ++j) {
    v.segment(static_cast<Eigen::Index>(j) * width, width).setConstant(std::ldexp(values[j], -m_));
  }
  return v;
}

DyadicFamily l1_dyadic_family(int m) {
  DyadicModel model(m);
  std::vector<HomFn> members;
  for (int n = 1; n <= m; ++n) members.push_back(model.f(n).fn());
  DirectedFamily family = DirectedFamily::verified(model.space(), std::move(members));
  return {std::move(model), std::move(family)};
}

LimitCheck l1_limit_check(const DyadicModel& model, const Vec& y_star, int n) {
  const int m = model.level();
  model.space().check_dim(y_star, "limit check functional");
  if (n < 0 || n > m) throw ValidationError("limit check: level out of range");
  const int width = 1 << (m - n);
  for (int b = 0; b < (1 << n); ++b) {
    for (int i = 1; i < width; ++i) {
      if (y_star(b * width + i) != y_star(b * width)) {
        throw ValidationError("limit check: functional is not constant on the level-" + std::to_string(n) + " blocks");
      }
    }
  }
  LimitCheck r;
  r.n = n;
  for (int j = 0; j <= m; ++j) r.values.push_back(model.f(j).eval(y_star));
  r.l1_norm = y_star.cwiseAbs().sum();
  const double fn = r.values[static_cast<std::size_t>(n)];
  r.equal = fn == r.l1_norm;
  r.nondecreasing = std::is_sorted(r.values.begin(), r.values.end());
  r.limit_constant = std::all_of(r.values.begin() + n, r.values.end(), [&](double v) { return v == fn; });
  return r;
}

C0Report c0_summing_demo(int N) {
  if (N < 1) throw ValidationError("c0 demo: N must be positive");
  C0Report r;
  r.N = N;
  r.least_upper_bound.assign(static_cast<std::size_t>(N), 0.0);
  for (int n = 1; n <= N; ++n) {
    std::vector<double> s(static_cast<std::size_t>(N), 0.0);
    std::fill(s.begin(), s.begin() + n, 1.0);
    double norm = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      norm = std::max(norm, std::abs(s[i]));
      r.least_upper_bound[i] = std::max(r.least_upper_bound[i], s[i]);
    }
    r.member_norms.push_back(norm);
    r.sup_member_norm = std::max(r.sup_member_norm, norm);
    r.members.push_back(std::move(s));
  }
  for (const double b : r.least_upper_bound) r.bound_norm = std::max(r.bound_norm, std::abs(b));
  r.tail_profile.assign(static_cast<std::size_t>(N), 0.0);
  double tail = 0.0;
  for (int j = N - 1; j >= 0; --j) {
    tail = std::max(tail, std::abs(r.least_upper_bound[static_cast<std::size_t>(j)]));
    r.tail_profile[static_cast<std::size_t>(j)] = tail;
  }
  r.dominates = true;
  r.minimal = true;
  for (std::size_t i = 0; i < r.least_upper_bound.size(); ++i) {
    bool attained = false;
    for (const auto& s : r.members) {
      r.dominates = r.dominates && s[i] <= r.least_upper_bound[i];
      attained = attained || s[i] == r.least_upper_bound[i];
    }
    r.minimal = r.minimal && attained;
  }
  r.note =
      "finite truncation of an infinite obstruction: the least upper bound has tail profile "
      "identically 1, so it does not vanish at infinity and no upper bound lies in c0";
  return r;
}

}  // namespace fbl

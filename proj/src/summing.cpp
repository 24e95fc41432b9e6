#include "fbl/summing.hpp"

#include <cmath>
#include <functional>
#include <vector>

#include "fbl/errors.hpp"
#include "fbl/sampling.hpp"

namespace fbl {

const char* to_string(Exactness e) {
  return e == Exactness::kExact ? "exact" : "heuristic";
}

namespace {

double power_sum(const Eigen::MatrixXd& tuple, const Vec& x, double p) {
  const Vec pairing = tuple.transpose() * x;
  if (p == 1.0) return pairing.lpNorm<1>();
  return pairing.array().abs().pow(p).sum();
}

double by_extreme_points(const Eigen::MatrixXd& tuple, const Eigen::MatrixXd& ext, double p) {
  const Eigen::MatrixXd pairing = tuple.transpose() * ext;  // k x m
  if (p == 1.0) return pairing.cwiseAbs().colwise().sum().maxCoeff();
  return pairing.array().abs().pow(p).colwise().sum().maxCoeff();
}

double by_sign_enumeration(const Space& space, const Eigen::MatrixXd& tuple) {
  // eps and -eps give the same norm, so fix eps_0 = +1 and walk the
  // remaining patterns in Gray-code order.
  const Eigen::Index k = tuple.cols();
  Vec combo = tuple.rowwise().sum();
  double best = space.dual_norm(combo);
  std::vector<int> sign(static_cast<std::size_t>(k), 1);
  const std::uint64_t patterns = std::uint64_t{1} << (k - 1);
  for (std::uint64_t g = 1; g < patterns; ++g) {
    const int bit = __builtin_ctzll(g) + 1;  // flip functional `bit`
    auto& s = sign[static_cast<std::size_t>(bit)];
    combo -= 2.0 * s * tuple.col(bit);
    s = -s;
    best = std::max(best, space.dual_norm(combo));
  }
  return best;
}

// Sign patterns that occur as (sign <x_i*, u>)_i: in the plane, the cells on
// either side of each line u ⟂ x_i*. `tangent` resolves functionals that
// vanish at the boundary direction.
constexpr double kVanish = 1e-12;

void planar_patterns(const Eigen::MatrixXd& coords, const std::function<void(const Vec&)>& visit) {
  const Eigen::Index k = coords.cols();
  Vec after(k), before(k);
  for (Eigen::Index b = 0; b < k; ++b) {
    const Vec x = coords.col(b);
    const double len = x.norm();
    if (len == 0.0) continue;
    const Eigen::Vector2d u(-x(1) / len, x(0) / len), t(-u(1), u(0));
    for (Eigen::Index i = 0; i < k; ++i) {
      const Eigen::Vector2d y = coords.col(i);
      const double s = y.dot(u);
      if (std::abs(s) > kVanish * y.norm()) {
        after(i) = before(i) = s > 0 ? 1.0 : -1.0;
      } else {
        const double d = y.dot(t);
        after(i) = d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0);
        before(i) = -after(i);
      }
    }
    visit(after);
    visit(before);
  }
}

// Exact for p = 1 in dimensions 1 to 3: the maximizing sign pattern is one
// realized by some direction u, and those are O(k) (plane) or O(k^2)
// (space, the cells around each vertex x_i* x x_j* of the arrangement).
double by_arrangement(const Space& space, const Eigen::MatrixXd& tuple) {
  const int n = static_cast<int>(tuple.rows());
  const Eigen::Index k = tuple.cols();
  double best = 0.0;
  auto visit = [&](const Vec& eps) { best = std::max(best, space.dual_norm(tuple * eps)); };
  if (n == 1) {
    visit(tuple.row(0).transpose().unaryExpr([](double v) { return v >= 0 ? 1.0 : -1.0; }));
    return best;
  }
  if (n == 2) {
    planar_patterns(tuple, visit);
    if (best == 0.0) visit(Vec::Ones(k));
    return best;
  }
  bool vertex = false;
  Vec eps(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a + 1; b < k; ++b) {
      const Eigen::Vector3d xa = tuple.col(a), xb = tuple.col(b);
      Eigen::Vector3d v = xa.cross(xb);
      const double len = v.norm();
      if (len <= kVanish * xa.norm() * xb.norm()) continue;
      vertex = true;
      v /= len;
      // Tangent basis at v.
      Eigen::Vector3d t1 = v.unitOrthogonal();
      const Eigen::Vector3d t2 = v.cross(t1);
      for (const double side : {1.0, -1.0}) {
        std::vector<Eigen::Index> through;
        for (Eigen::Index i = 0; i < k; ++i) {
          const Eigen::Vector3d y = tuple.col(i);
          const double s = side * y.dot(v);
          if (std::abs(s) > kVanish * y.norm()) {
            eps(i) = s > 0 ? 1.0 : -1.0;
          } else {
            through.push_back(i);
          }
        }
        Eigen::MatrixXd local(2, static_cast<Eigen::Index>(through.size()));
        for (std::size_t j = 0; j < through.size(); ++j) {
          const Eigen::Vector3d y = tuple.col(through[j]);
          local.col(static_cast<Eigen::Index>(j)) = Eigen::Vector2d(y.dot(t1), y.dot(t2));
        }
        planar_patterns(local, [&](const Vec& sub) {
          for (std::size_t j = 0; j < through.size(); ++j) eps(through[j]) = sub(static_cast<Eigen::Index>(j));
          visit(eps);
        });
      }
    }
  }
  if (!vertex) {
    // All functionals on one line: align them with the largest.
    Eigen::Index lead = 0;
    tuple.colwise().norm().maxCoeff(&lead);
    const Vec pairing = tuple.transpose() * tuple.col(lead);
    visit(pairing.unaryExpr([](double v) { return v >= 0 ? 1.0 : -1.0; }));
  }
  return best;
}

double by_ascent(const Space& space, const Eigen::MatrixXd& tuple, double p,
                 const SummingOptions& options) {
  Rng rng(options.seed);
  double best = 0.0;
  const Eigen::Index k = tuple.cols();
  const int starts = std::max<int>(options.ascent_starts, static_cast<int>(k));
  for (int s = 0; s < starts; ++s) {
    Vec x = s < k ? space.norming_vector(tuple.col(s)) : random_primal_sphere_point(space, rng);
    double value = power_sum(tuple, x, p);
    for (int it = 0; it < options.ascent_iters; ++it) {
      const Vec pairing = tuple.transpose() * x;
      Vec weight(k);
      for (Eigen::Index i = 0; i < k; ++i) {
        const double a = pairing(i);
        weight(i) = (a >= 0 ? 1.0 : -1.0) * (p == 1.0 ? 1.0 : p * std::pow(std::abs(a), p - 1.0));
      }
      const Vec grad = tuple * weight;
      if (grad.lpNorm<Eigen::Infinity>() == 0.0) break;
      const Vec next = space.norming_vector(grad);
      const double next_value = power_sum(tuple, next, p);
      if (next_value <= value * (1.0 + 1e-15)) {
        value = std::max(value, next_value);
        break;
      }
      x = next;
      value = next_value;
    }
    best = std::max(best, value);
  }
  return best;
}

}  // namespace

namespace {

bool use_arrangement(const Space& space, int k, double p) {
  return p == 1.0 && space.dim() <= 3 && k >= 4;
}

}  // namespace

bool summing_is_exact(const Space& space, int k, double p, const SummingOptions& options) {
  if (space.extreme_points()) return true;
  if (use_arrangement(space, k, p)) return true;
  if (p == 1.0 && k <= options.k_exact) return true;
  return space.kind() == NormKind::kPNorm && space.exponent() == 2.0 && p == 2.0;
}

SummingValue summing_constraint(const Space& space, const Eigen::MatrixXd& tuple, double p,
                                const SummingOptions& options) {
  if (tuple.cols() == 0) throw ValidationError("summing_constraint: empty tuple");
  if (tuple.rows() != space.dim()) throw ValidationError("summing_constraint: dimension mismatch");
  if (!(p >= 1.0) || std::isinf(p)) throw ValidationError("summing_constraint: p must lie in [1, inf)");

  if (const auto& ext = space.extreme_points()) {
    return {by_extreme_points(tuple, *ext, p), Exactness::kExact, "extreme-points"};
  }
  const auto k = static_cast<int>(tuple.cols());
  if (use_arrangement(space, k, p)) {
    return {by_arrangement(space, tuple), Exactness::kExact, "arrangement"};
  }
  if (p == 1.0 && k <= options.k_exact) {
    return {by_sign_enumeration(space, tuple), Exactness::kExact, "sign-enumeration"};
  }
  if (space.kind() == NormKind::kPNorm && space.exponent() == 2.0 && p == 2.0) {
    const Eigen::MatrixXd gram = tuple * tuple.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    return {std::max(0.0, eig.eigenvalues().maxCoeff()), Exactness::kExact, "spectral"};
  }
  return {by_ascent(space, tuple, p, options), Exactness::kHeuristic, "ascent"};
}

}  // namespace fbl

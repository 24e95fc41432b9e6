#include "fbl/sampling.hpp"

namespace fbl {

Vec gaussian_vector(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

namespace {

Vec random_direction(int n, Rng& rng) {
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  for (;;) {
    Vec v;
    if (coin(rng) == 0) {
      v = gaussian_vector(n, rng);
    } else {
      v.resize(n);
      for (int i = 0; i < n; ++i) v(i) = uniform(rng);
    }
    if (v.lpNorm<Eigen::Infinity>() > 1e-12) return v;
  }
}

}  // namespace

Vec random_dual_sphere_point(const Space& space, Rng& rng) {
  Vec v = random_direction(space.dim(), rng);
  return v / space.dual_norm(v);
}

Vec random_primal_sphere_point(const Space& space, Rng& rng) {
  Vec v = random_direction(space.dim(), rng);
  return v / space.primal_norm(v);
}

Vec random_primal_ball_point(const Space& space, Rng& rng) {
  std::uniform_real_distribution<double> radius(0.0, 1.0);
  return radius(rng) * random_primal_sphere_point(space, rng);
}

std::vector<Vec> validation_sample(const Space& space, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec> out;
  out.reserve(count + 2 * static_cast<std::size_t>(space.dim()));
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_dual_sphere_point(space, rng));
  for (int j = 0; j < space.dim(); ++j) {
    out.push_back(Vec::Unit(space.dim(), j));
    out.push_back(-Vec::Unit(space.dim(), j));
  }
  return out;
}

}  // namespace fbl

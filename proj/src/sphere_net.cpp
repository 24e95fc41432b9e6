#include "fbl/sphere_net.hpp"

#include <cmath>
#include <numbers>

#include "fbl/errors.hpp"
#include "fbl/sampling.hpp"

namespace fbl {

namespace {

// All points of the grid {-1, -1 + 2/N, ..., 1}^n with at least one
// coordinate equal to +-1, i.e. the grid on the surface of the cube.
std::vector<Vec> cube_surface_grid(int n, long intervals, std::size_t max_points) {
  const double count_all = std::pow(static_cast<double>(intervals + 1), n);
  const double count_inner = std::pow(static_cast<double>(std::max(0L, intervals - 1)), n);
  if (count_all - count_inner > static_cast<double>(max_points)) {
    throw ComputationError("sphere_net: net would exceed the configured point budget");
  }
  std::vector<Vec> out;
  std::vector<long> idx(static_cast<std::size_t>(n), 0);
  for (;;) {
    bool on_surface = false;
    Vec u(n);
    for (int i = 0; i < n; ++i) {
      const long k = idx[static_cast<std::size_t>(i)];
      on_surface = on_surface || k == 0 || k == intervals;
      u(i) = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(intervals);
    }
    if (on_surface) out.push_back(std::move(u));
    int i = 0;
    while (i < n && ++idx[static_cast<std::size_t>(i)] > intervals) {
      idx[static_cast<std::size_t>(i)] = 0;
      ++i;
    }
    if (i == n) break;
  }
  return out;
}

std::vector<Vec> box_net(const Space& space, double delta, std::size_t max_points) {
  // Dual ball is the box prod [-1/w_i... ] scaled so that |f_i| / w_i <= 1;
  // in the coordinates u_i = f_i / w_i it is the unit cube with the sup
  // metric, where a grid of spacing 2/N leaves every point within 1/N.
  const Vec w = space.l1_weights();
  const long intervals = static_cast<long>(std::ceil(1.0 / delta - 1e-12));
  auto grid = cube_surface_grid(space.dim(), std::max(1L, intervals), max_points);
  for (auto& u : grid) u = u.cwiseProduct(w);
  return grid;
}

std::vector<Vec> circle_net(double delta) {
  const auto count = static_cast<int>(std::ceil(std::numbers::pi / delta - 1e-12));
  const int n = std::max(count, 3);
  std::vector<Vec> out;
  for (int i = 0; i < n; ++i) {
    const double angle = 2.0 * std::numbers::pi * i / n;
    out.push_back((Vec(2) << std::cos(angle), std::sin(angle)).finished());
  }
  return out;
}

std::vector<Vec> radial_net(const Space& space, double delta, std::size_t max_points) {
  const int n = space.dim();
  double unit_sum = 0.0;
  for (int i = 0; i < n; ++i) unit_sum += space.dual_norm(Vec::Unit(n, i));
  const double spacing = delta * space.dual_vs_sup_lower() / unit_sum;
  const long intervals = static_cast<long>(std::ceil(2.0 / spacing - 1e-12));
  auto grid = cube_surface_grid(n, std::max(1L, intervals), max_points);
  for (auto& u : grid) u /= space.dual_norm(u);
  return grid;
}

}  // namespace

std::vector<Vec> sphere_net(const Space& space, double delta, const NetOptions& options) {
  if (!(delta > 0.0)) throw ValidationError("sphere_net: delta must be positive");
  if (delta > 1.0) throw ValidationError("sphere_net: delta must not exceed 1");

  std::vector<Vec> net;
  if (space.dim() == 1) {
    const double r = 1.0 / space.dual_norm(Vec::Ones(1));
    net = {Vec::Constant(1, -r), Vec::Constant(1, r)};
  } else if (space.is_l1_type()) {
    net = box_net(space, delta, options.max_points);
  } else if (space.kind() == NormKind::kPNorm && space.exponent() == 2.0 && space.dim() == 2) {
    net = circle_net(delta);
  } else {
    net = radial_net(space, delta, options.max_points);
  }

  if (options.verify_samples > 0) {
    // Keep the brute-force check within ~2e8 distance evaluations.
    const double budget = 2e8 / static_cast<double>(net.size());
    const auto samples = static_cast<std::size_t>(
        std::max(1000.0, std::min(static_cast<double>(options.verify_samples), budget)));
    const auto check = verify_net(space, net, delta, samples, options.seed);
    if (!check.covered) {
      throw ComputationError("sphere_net: coverage check failed");
    }
  }
  return net;
}

CoverageCheck verify_net(const Space& space, const std::vector<Vec>& net, double delta,
                         std::size_t samples, std::uint64_t seed) {
  Rng rng(seed);
  CoverageCheck check;
  check.samples = samples;
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec z = random_dual_sphere_point(space, rng);
    double nearest = kInfinity;
    for (const auto& y : net) {
      nearest = std::min(nearest, space.dual_norm(z - y));
    }
    check.worst_distance = std::max(check.worst_distance, nearest);
  }
  check.covered = check.worst_distance <= delta * (1.0 + 1e-9);
  return check;
}

}  // namespace fbl

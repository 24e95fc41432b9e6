#include <gtest/gtest.h>

#include <cmath>

#include "fbl/errors.hpp"
#include "fbl/sampling.hpp"
#include "fbl/space.hpp"
#include "fbl/sphere_net.hpp"
#include "fbl/summing.hpp"

namespace {

using fbl::Space;
using fbl::Vec;

Vec v2(double a, double b) { return Eigen::Vector2d(a, b); }

Eigen::MatrixXd cols(std::initializer_list<Vec> vs) {
  Eigen::MatrixXd M(vs.begin()->size(), static_cast<Eigen::Index>(vs.size()));
  Eigen::Index j = 0;
  for (const Vec& v : vs) M.col(j++) = v;
  return M;
}

// Hexagon with vertices +-(1,0), +-(0,1), +-(1,1).
Space hexagon() {
  Eigen::MatrixXd V(2, 6);
  V << 1, -1, 0, 0, 1, -1, 0, 0, 1, -1, 1, -1;
  return Space::polytope(V);
}

TEST(PrimalNorm, Examples) {
  EXPECT_DOUBLE_EQ(Space::l1(2).primal_norm(v2(3, -4)), 7.0);
  EXPECT_DOUBLE_EQ(Space::l2(2).primal_norm(v2(3, 4)), 5.0);
  EXPECT_DOUBLE_EQ(Space::weighted_l1(v2(0.5, 0.5)).primal_norm(v2(1, 1)), 1.0);
  EXPECT_DOUBLE_EQ(Space::linf(3).primal_norm(Eigen::Vector3d(1, -7, 2)), 7.0);
}

TEST(PrimalNorm, PolytopeGaugeMatchesClosedForms) {
  Eigen::MatrixXd V(3, 6);
  V << 1, -1, 0, 0, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0, 0, 0, 1, -1;
  const Space cross = Space::polytope(V);
  const Space hex = hexagon();
  fbl::Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Vec x = fbl::gaussian_vector(3, rng);
    EXPECT_NEAR(cross.primal_norm(x), x.lpNorm<1>(), 1e-9);
    // Gauge of the hexagon: max(|a|, |b|) if ab >= 0, else |a| + |b|.
    const double a = x(0), b = x(1);
    const double expected = a * b >= 0 ? std::max(std::abs(a), std::abs(b)) : std::abs(a) + std::abs(b);
    EXPECT_NEAR(hex.primal_norm(v2(a, b)), expected, 1e-9);
  }
}

TEST(PrimalNorm, Errors) {
  EXPECT_THROW(Space::l1(2).primal_norm(Eigen::Vector3d(1, 2, 3)), fbl::ValidationError);
  Eigen::MatrixXd flat(2, 2);
  flat << 1, -1, 0, 0;
  EXPECT_THROW(Space::polytope(flat), fbl::ValidationError);
  Eigen::MatrixXd lopsided(2, 3);
  lopsided << 1, 0, -1, 0, 1, 0;
  EXPECT_THROW(Space::polytope(lopsided), fbl::ValidationError);
  EXPECT_THROW(Space::weighted_l1(v2(1, 0)), fbl::ValidationError);
  EXPECT_THROW(Space::lp(2, 0.5), fbl::ValidationError);
}

TEST(DualNorm, Examples) {
  EXPECT_DOUBLE_EQ(Space::l1(2).dual_norm(v2(1, 1)), 1.0);
  EXPECT_DOUBLE_EQ(Space::l2(2).dual_norm(v2(3, 4)), 5.0);
  // Vertex enumeration over the weighted ball: vertices +-e_j / w_j.
  const Vec w = v2(0.5, 0.5), f = v2(0.5, 0.5);
  double by_vertices = 0.0;
  for (int j = 0; j < 2; ++j) by_vertices = std::max(by_vertices, std::abs(f(j)) / w(j));
  EXPECT_DOUBLE_EQ(by_vertices, 1.0);
  EXPECT_DOUBLE_EQ(Space::weighted_l1(w).dual_norm(f), by_vertices);
  EXPECT_THROW(Space::l2(2).dual_norm(Eigen::Vector3d(1, 1, 1)), fbl::ValidationError);
}

TEST(DualNorm, AgreesWithSupOverBall) {
  const std::vector<Space> spaces{Space::l1(3), Space::l2(3), Space::linf(3), Space::lp(3, 3.0),
                                  Space::weighted_l1(Eigen::Vector3d(0.5, 1.0, 2.0)), hexagon()};
  fbl::Rng rng(11);
  for (const Space& s : spaces) {
    for (int t = 0; t < 20; ++t) {
      const Vec f = fbl::gaussian_vector(s.dim(), rng);
      const double d = s.dual_norm(f);
      double sampled = 0.0;
      for (int i = 0; i < 2000; ++i) sampled = std::max(sampled, std::abs(f.dot(fbl::random_primal_ball_point(s, rng))));
      EXPECT_LE(sampled, d + 1e-12) << s.describe();
      const Vec x = s.norming_vector(f);
      EXPECT_LE(s.primal_norm(x), 1.0 + 1e-9) << s.describe();
      EXPECT_NEAR(f.dot(x), d, 1e-9) << s.describe();
    }
  }
}

TEST(Space, NormAxiomsOnSamples) {
  const std::vector<Space> spaces{Space::lp(3, 1.5), Space::weighted_l1(Eigen::Vector3d(1, 2, 3)),
                                  Space::direct_sum({Space::l1(1), Space::l2(2)}, 2.0)};
  fbl::Rng rng(5);
  for (const Space& s : spaces) {
    for (int i = 0; i < 100; ++i) {
      const Vec x = fbl::gaussian_vector(s.dim(), rng), y = fbl::gaussian_vector(s.dim(), rng);
      EXPECT_GT(s.primal_norm(x), 0.0);
      EXPECT_NEAR(s.primal_norm(-2.5 * x), 2.5 * s.primal_norm(x), 1e-12);
      EXPECT_LE(s.primal_norm(x + y), s.primal_norm(x) + s.primal_norm(y) + 1e-12);
    }
  }
}

TEST(DirectSum, Examples) {
  const Space a = Space::direct_sum({Space::l1(2), Space::l1(3)}, 1.0);
  const Space l15 = Space::l1(5);
  fbl::Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const Vec x = fbl::gaussian_vector(5, rng);
    EXPECT_NEAR(a.primal_norm(x), l15.primal_norm(x), 1e-12);
    EXPECT_NEAR(a.dual_norm(x), l15.dual_norm(x), 1e-12);
  }
  const Space b = Space::direct_sum({Space::l2(1), Space::l2(1)}, 2.0);
  for (int i = 0; i < 50; ++i) {
    const Vec x = fbl::gaussian_vector(2, rng);
    EXPECT_NEAR(b.primal_norm(x), x.norm(), 1e-12);
  }
  const Space c = Space::direct_sum({Space::l1(2), Space::l1(2)}, fbl::kInfinity);
  EXPECT_DOUBLE_EQ(c.primal_norm(Eigen::Vector4d(1, 0, 0, 1)), 1.0);
  EXPECT_EQ(c.dim(), 4);
  EXPECT_THROW(Space::direct_sum({}, 1.0), fbl::ValidationError);
}

TEST(SummingConstraint, Examples) {
  // Vertices +-e_j of the l1 ball: max_j sum_i |x_i*(e_j)| = 1.
  const auto s1 = fbl::summing_constraint(Space::l1(2), cols({v2(1, 0), v2(0, 1)}), 1.0);
  EXPECT_DOUBLE_EQ(s1.value, 1.0);
  EXPECT_EQ(s1.exactness, fbl::Exactness::kExact);
  const Space l2 = Space::l2(2);
  const Vec f = v2(0.6, -0.8);
  EXPECT_NEAR(fbl::summing_constraint(l2, cols({f}), 1.0).value, 1.0, 1e-15);
  // max over signs of ||(+-1, +-1)||_2.
  EXPECT_NEAR(fbl::summing_constraint(l2, cols({v2(1, 0), v2(0, 1)}), 1.0).value, std::sqrt(2.0), 1e-15);
  EXPECT_THROW(fbl::summing_constraint(l2, Eigen::MatrixXd(2, 0), 1.0), fbl::ValidationError);
  EXPECT_THROW(fbl::summing_constraint(l2, Eigen::MatrixXd::Ones(3, 1), 1.0), fbl::ValidationError);
}

TEST(SummingConstraint, HomogeneityAndSingletons) {
  const std::vector<Space> spaces{Space::l1(3), Space::l2(3), Space::linf(3), Space::lp(3, 4.0), hexagon()};
  fbl::Rng rng(21);
  for (const Space& s : spaces) {
    for (const double p : {1.0, 2.0, 3.0}) {
      for (int t = 0; t < 5; ++t) {
        Eigen::MatrixXd X(s.dim(), 3);
        for (int j = 0; j < 3; ++j) X.col(j) = fbl::gaussian_vector(s.dim(), rng);
        const auto base = fbl::summing_constraint(s, X, p);
        if (base.exactness != fbl::Exactness::kExact) continue;
        EXPECT_NEAR(fbl::summing_constraint(s, 1.7 * X, p).value, std::pow(1.7, p) * base.value, 1e-9 * base.value);
        const Vec one = X.col(0);
        EXPECT_NEAR(fbl::summing_constraint(s, Eigen::MatrixXd(one), p).value, std::pow(s.dual_norm(one), p), 1e-9);
      }
    }
  }
}

TEST(SummingConstraint, SignEnumerationDominatesSamplesAndMatchesVertices) {
  const std::vector<Space> polytopes{Space::l1(2), Space::l1(3), Space::linf(2), Space::linf(3), hexagon()};
  fbl::Rng rng(9);
  for (const Space& s : polytopes) {
    for (int k = 1; k <= 4; ++k) {
      Eigen::MatrixXd X(s.dim(), k);
      for (int j = 0; j < k; ++j) X.col(j) = fbl::gaussian_vector(s.dim(), rng);
      // Sign enumeration computed here, against the library's vertex route.
      double by_signs = 0.0;
      for (int code = 0; code < (1 << k); ++code) {
        Vec g = Vec::Zero(s.dim());
        for (int j = 0; j < k; ++j) g += ((code >> j) & 1 ? -1.0 : 1.0) * X.col(j);
        by_signs = std::max(by_signs, s.dual_norm(g));
      }
      const double by_vertices = fbl::summing_constraint(s, X, 1.0).value;
      EXPECT_NEAR(by_signs, by_vertices, 1e-9) << s.describe() << " k=" << k;
    }
  }
  const Space l2 = Space::l2(3);
  for (int t = 0; t < 10; ++t) {
    Eigen::MatrixXd X(3, 4);
    for (int j = 0; j < 4; ++j) X.col(j) = fbl::gaussian_vector(3, rng);
    const double exact = fbl::summing_constraint(l2, X, 1.0).value;
    for (int i = 0; i < 500; ++i) {
      const Vec x = fbl::random_primal_ball_point(l2, rng);
      EXPECT_LE((X.transpose() * x).cwiseAbs().sum(), exact + 1e-12);
    }
  }
}

TEST(SummingConstraint, ArrangementMatchesFullSignEnumeration) {
  const std::vector<Space> smooth{Space::l2(2), Space::l2(3), Space::lp(2, 1.5), Space::lp(3, 3.0)};
  fbl::Rng rng(17);
  auto full = [](const Space& s, const Eigen::MatrixXd& X) {
    double best = 0.0;
    const int k = static_cast<int>(X.cols());
    for (int code = 0; code < (1 << k); ++code) {
      Vec g = Vec::Zero(s.dim());
      for (int j = 0; j < k; ++j) g += ((code >> j) & 1 ? -1.0 : 1.0) * X.col(j);
      best = std::max(best, s.dual_norm(g));
    }
    return best;
  };
  for (const Space& s : smooth) {
    for (int k = 4; k <= 10; ++k) {
      for (int variant = 0; variant < 4; ++variant) {
        Eigen::MatrixXd X(s.dim(), k);
        for (int j = 0; j < k; ++j) X.col(j) = fbl::gaussian_vector(s.dim(), rng);
        if (variant == 1) X.col(1) = -2.5 * X.col(0);          // parallel pair
        if (variant == 2) X.col(k - 1).setZero();               // zero functional
        if (variant == 3 && s.dim() == 3) X.row(2).setZero();   // all in one plane
        if (variant == 3 && s.dim() == 2) X.col(2) = X.col(3);  // repeated
        const auto r = fbl::summing_constraint(s, X, 1.0);
        EXPECT_EQ(r.method, "arrangement");
        EXPECT_EQ(r.exactness, fbl::Exactness::kExact);
        EXPECT_NEAR(r.value, full(s, X), 1e-12 * (1 + r.value)) << s.describe() << " k=" << k << " variant " << variant;
      }
    }
  }
  // All functionals on one line.
  Eigen::MatrixXd line(3, 5);
  for (int j = 0; j < 5; ++j) line.col(j) = (j % 2 ? -1.0 : 0.5 * j + 1) * Eigen::Vector3d(1, 2, 2);
  EXPECT_NEAR(fbl::summing_constraint(Space::l2(3), line, 1.0).value, full(Space::l2(3), line), 1e-12);
}

TEST(SummingConstraint, RoutesAndHeuristicFlag) {
  Eigen::MatrixXd X = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_EQ(fbl::summing_constraint(Space::l2(3), X, 2.0).method, "spectral");
  EXPECT_NEAR(fbl::summing_constraint(Space::l2(3), X, 2.0).value, 1.0, 1e-12);
  const auto h = fbl::summing_constraint(Space::lp(3, 3.0), X, 2.0);
  EXPECT_EQ(h.exactness, fbl::Exactness::kHeuristic);
  // sup_{||x||_3 <= 1} sum x_i^2 = 3^{1/3} at x = 3^{-1/3}(1,1,1).
  EXPECT_LE(h.value, std::cbrt(3.0) + 1e-12);
  EXPECT_GE(h.value, std::cbrt(3.0) - 1e-6);
  fbl::SummingOptions small;
  small.k_exact = 2;
  EXPECT_EQ(fbl::summing_constraint(Space::l2(3), X, 1.0, small).exactness, fbl::Exactness::kHeuristic);
  EXPECT_TRUE(fbl::summing_is_exact(Space::l2(3), 3, 1.0));
}

void expect_covers(const Space& s, const std::vector<Vec>& net, double delta) {
  for (const Vec& y : net) EXPECT_NEAR(s.dual_norm(y), 1.0, 1e-9);
  fbl::Rng rng(77);
  for (int i = 0; i < 10000; ++i) {
    const Vec x = fbl::random_dual_sphere_point(s, rng);
    double best = fbl::kInfinity;
    for (const Vec& y : net) best = std::min(best, s.dual_norm(x - y));
    ASSERT_LE(best, delta) << s.describe();
  }
}

TEST(SphereNet, Examples) {
  const auto one = fbl::sphere_net(Space::l2(1), 0.5);
  ASSERT_EQ(one.size(), 2u);
  EXPECT_DOUBLE_EQ(std::min(one[0](0), one[1](0)), -1.0);
  EXPECT_DOUBLE_EQ(std::max(one[0](0), one[1](0)), 1.0);

  const auto square = fbl::sphere_net(Space::l1(2), 0.5);
  EXPECT_LE(square.size(), 16u);
  for (const Vec& y : square) EXPECT_NEAR(y.lpNorm<Eigen::Infinity>(), 1.0, 1e-12);
  expect_covers(Space::l1(2), square, 0.5);

  const auto circle = fbl::sphere_net(Space::l2(2), 0.1);
  EXPECT_LE(circle.size(), static_cast<std::size_t>(std::ceil(2 * M_PI / 0.1)));
  expect_covers(Space::l2(2), circle, 0.1);
}

TEST(SphereNet, GenericAndPolytopeCoverage) {
  for (const Space& s : {Space::lp(3, 3.0), Space::linf(2), hexagon(), Space::weighted_l1(Eigen::Vector3d(1, 0.5, 2))}) {
    expect_covers(s, fbl::sphere_net(s, 0.3), 0.3);
  }
  EXPECT_THROW(fbl::sphere_net(Space::l2(2), 0.0), fbl::ValidationError);
  EXPECT_THROW(fbl::sphere_net(Space::l2(2), -1.0), fbl::ValidationError);
}

}  // namespace

#include <gtest/gtest.h>

#include "fbl/errors.hpp"
#include "fbl/fbl_norm.hpp"
#include "fbl/sampling.hpp"
#include "fbl/witnesses.hpp"

namespace {

using fbl::Vec;

TEST(Dyadic, LevelOne) {
  const fbl::DyadicModel model(1);
  const Vec half = Eigen::Vector2d(0.5, 0.5);
  EXPECT_DOUBLE_EQ(model.space().primal_norm(half), 0.5);
  EXPECT_DOUBLE_EQ(model.f(1).eval(half), 1.0);
  EXPECT_DOUBLE_EQ(model.f(0).eval(half), 1.0);
  EXPECT_NEAR(fbl::fbl_norm_k(model.space(), model.f(1), 1.0, 2).value, 1.0, 1e-9);
}

TEST(Dyadic, IndicatorImages) {
  const fbl::DyadicModel model(3);
  const Vec y = model.y(2, 3);  // [1/2, 3/4] covers coordinates 4 and 5 of 8
  for (int i = 0; i < 8; ++i) EXPECT_EQ(y(i), (i == 4 || i == 5) ? 1.0 : 0.0);
  EXPECT_DOUBLE_EQ(model.space().primal_norm(y), 0.25);
  EXPECT_THROW(model.y(2, 5), fbl::ValidationError);
  EXPECT_THROW(model.y(4, 1), fbl::ValidationError);
}

TEST(Dyadic, FamilyIsIncreasing) {
  const auto fam = fbl::l1_dyadic_family(4);
  const auto& model = fam.model;
  fbl::Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const Vec x = fbl::gaussian_vector(16, rng);
    for (int n = 1; n < 4; ++n) EXPECT_LE(model.f(n).eval(x), model.f(n + 1).eval(x) + 1e-12);
  }
  EXPECT_EQ(fam.family.size(), 4u);
}

TEST(Dyadic, MembersHaveNormOne) {
  const fbl::DyadicModel model(4);
  for (int n = 0; n <= 4; ++n) {
    const double v = fbl::fbl_norm_k(model.space(), model.f(n), 1.0, 4).value;
    EXPECT_LE(v, 1.0 + 1e-9) << "n = " << n;
    EXPECT_GE(v, 1.0 - 1e-6) << "n = " << n;
  }
}

TEST(LimitCheck, AllOnes) {
  const fbl::DyadicModel model(3);
  const auto c = fbl::l1_limit_check(model, model.block_functional(0, {1.0}), 0);
  EXPECT_TRUE(c.equal);
  EXPECT_TRUE(c.nondecreasing);
  EXPECT_TRUE(c.limit_constant);
  EXPECT_EQ(c.l1_norm, 1.0);
  for (const double v : c.values) EXPECT_EQ(v, 1.0);
}

TEST(LimitCheck, Rademacher) {
  const fbl::DyadicModel model(3);
  const auto c = fbl::l1_limit_check(model, model.block_functional(1, {1.0, -1.0}), 1);
  EXPECT_EQ(c.values[0], 0.0);
  EXPECT_EQ(c.values[1], 1.0);
  EXPECT_TRUE(c.equal);
  EXPECT_TRUE(c.nondecreasing);
  EXPECT_TRUE(c.limit_constant);
}

TEST(LimitCheck, ZeroAndErrors) {
  const fbl::DyadicModel model(2);
  const auto c = fbl::l1_limit_check(model, Vec::Zero(4), 0);
  EXPECT_TRUE(c.equal);
  for (const double v : c.values) EXPECT_EQ(v, 0.0);
  const Vec y = Eigen::Vector4d(1, 2, 1, 1);
  EXPECT_THROW(fbl::l1_limit_check(model, y, 1), fbl::ValidationError);
  EXPECT_NO_THROW(fbl::l1_limit_check(model, y, 2));
  EXPECT_THROW(fbl::DyadicModel(0), fbl::ValidationError);
  EXPECT_THROW(fbl::DyadicModel(9), fbl::ValidationError);
  EXPECT_THROW(model.block_functional(1, {1.0}), fbl::ValidationError);
}

TEST(LimitCheck, RandomBlockConstantFunctionals) {
  const fbl::DyadicModel model(4);
  fbl::Rng rng(21);
  std::uniform_int_distribution<int> level(0, 4);
  // Block values on a grid of 1/64 keep every partial sum exact in floating point.
  std::uniform_int_distribution<int> grid(-640, 640);
  for (int t = 0; t < 20; ++t) {
    const int n = level(rng);
    std::vector<double> vals(std::size_t(1) << n);
    for (double& v : vals) v = grid(rng) / 64.0;
    const auto c = fbl::l1_limit_check(model, model.block_functional(n, vals), n);
    EXPECT_TRUE(c.equal);
    EXPECT_TRUE(c.nondecreasing);
    EXPECT_TRUE(c.limit_constant);
  }
}

TEST(C0, SummingBasis) {
  const auto r = fbl::c0_summing_demo(3);
  ASSERT_EQ(r.members.size(), 3u);
  EXPECT_EQ(r.members[1], (std::vector<double>{1, 1, 0}));
  EXPECT_EQ(r.least_upper_bound, (std::vector<double>{1, 1, 1}));
  EXPECT_EQ(r.tail_profile, (std::vector<double>{1, 1, 1}));
  EXPECT_EQ(r.sup_member_norm, 1.0);
  EXPECT_EQ(r.bound_norm, 1.0);
  EXPECT_TRUE(r.dominates);
  EXPECT_TRUE(r.minimal);
  EXPECT_FALSE(r.note.empty());
  const auto one = fbl::c0_summing_demo(1);
  EXPECT_EQ(one.least_upper_bound, (std::vector<double>{1}));
  EXPECT_THROW(fbl::c0_summing_demo(0), fbl::ValidationError);
}

}  // namespace

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "armtwin/transform.hpp"

namespace armtwin {
namespace {

constexpr double kPi = std::numbers::pi;

void expect_near(const Vec3& a, const Vec3& b, double tol) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(a.z, b.z, tol);
}

TEST(Transform, IdentityLeavesPointsAlone) {
  const Vec3 p{1.5, -2.0, 3.25};
  EXPECT_EQ(Transform4::identity().apply(p), p);
}

TEST(Transform, TranslateMovesPoints) {
  expect_near(translate(1, 2, 3).apply({1, 1, 1}), {2, 3, 4}, 0.0);
  expect_near(translate(1, 2, 3).apply_linear({1, 1, 1}), {1, 1, 1}, 0.0);
}

TEST(Transform, QuarterTurns) {
  expect_near(rot_z(kPi / 2).apply({1, 0, 0}), {0, 1, 0}, 1e-15);
  expect_near(rot_x(kPi / 2).apply({0, 1, 0}), {0, 0, 1}, 1e-15);
  // rot_y takes +z toward +x.
  expect_near(rot_y(kPi / 2).apply({0, 0, 1}), {1, 0, 0}, 1e-15);
  expect_near(rot_y(0.3).apply({0, 0, 1}), {std::sin(0.3), 0, std::cos(0.3)}, 1e-15);
}

TEST(Transform, BottomRowStaysExact) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  Transform4 t;
  for (int i = 0; i < 200; ++i) {
    t = t * rot_z(ang(rng)) * translate(ang(rng), ang(rng), ang(rng)) * rot_y(ang(rng));
    EXPECT_EQ(t(3, 0), 0.0);
    EXPECT_EQ(t(3, 1), 0.0);
    EXPECT_EQ(t(3, 2), 0.0);
    EXPECT_EQ(t(3, 3), 1.0);
  }
  EXPECT_LT(orthonormality_error(t), 1e-12);
}

TEST(Transform, ComposeIsAssociativeAndMatchesSequentialApply) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 100; ++i) {
    const Transform4 a = rot_x(u(rng)) * translate(u(rng), u(rng), u(rng));
    const Transform4 b = rot_y(u(rng)) * translate(u(rng), 0, u(rng));
    const Transform4 c = rot_z(u(rng));
    const Vec3 p{u(rng), u(rng), u(rng)};
    expect_near((a * b).apply(p), a.apply(b.apply(p)), 1e-12);
    const Transform4 l = (a * b) * c;
    const Transform4 r = a * (b * c);
    for (std::size_t k = 0; k < 16; ++k) EXPECT_NEAR(l.data()[k], r.data()[k], 1e-12);
  }
}

TEST(Transform, RotationsAreOrthonormal) {
  for (double t : {-3.0, -1.0, 0.0, 0.4, 2.5}) {
    EXPECT_LT(orthonormality_error(rot_x(t)), 1e-15);
    EXPECT_LT(orthonormality_error(rot_y(t)), 1e-15);
    EXPECT_LT(orthonormality_error(rot_z(t)), 1e-15);
  }
}

TEST(Transform, Distance) {
  EXPECT_DOUBLE_EQ(distance({0, 0, 0}, {3, 4, 12}), 13.0);
}

}  // namespace
}  // namespace armtwin

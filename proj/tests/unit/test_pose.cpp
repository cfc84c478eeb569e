#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "../support/oracles.hpp"
#include "oscar/error.hpp"
#include "oscar/pose.hpp"

namespace oscar {
namespace {

using testing::oracle_rotation_angle_deg;
using testing::random_rotation;

const Mat3 kIdentity{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

TEST(TranslationErrorTest, Basics) {
  EXPECT_EQ(translation_error({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_EQ(translation_error({3, 4, 0}, {0, 0, 0}), 5.0);
  EXPECT_EQ(translation_error({10, 10, 10}, {7, 6, 10}), 5.0);
}

TEST(TranslationErrorTest, MatchesComponentwiseRecomputation) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-500.0, 500.0);
  for (int i = 0; i < 100; ++i) {
    const Vec3 a{u(rng), u(rng), u(rng)};
    const Vec3 b{u(rng), u(rng), u(rng)};
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    EXPECT_NEAR(translation_error(a, b), std::sqrt(dx * dx + dy * dy + dz * dz), 1e-12);
  }
}

TEST(RotationErrorTest, IdenticalIsZero) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const Mat3 r = random_rotation(rng);
    EXPECT_EQ(rotation_error(r, r), 0.0);
  }
}

TEST(RotationErrorTest, NinetyAboutZ) {
  std::mt19937_64 rng(2);
  const Mat3 rz = axis_angle_rotation({0, 0, 1}, 90.0);
  EXPECT_NEAR(rotation_error(kIdentity, rz), 90.0, 1e-9);
  const Mat3 r1 = random_rotation(rng);
  EXPECT_NEAR(rotation_error(r1, multiply(r1, rz)), 90.0, 1e-9);
}

TEST(RotationErrorTest, HalfTurn) {
  EXPECT_NEAR(rotation_error(kIdentity, axis_angle_rotation({1, 1, 0}, 180.0)), 180.0, 1e-9);
}

TEST(RotationErrorTest, MatchesArccosFormulaAwayFromSingularities) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Mat3 a = random_rotation(rng), b = random_rotation(rng);
    const Mat3 m = multiply(a, transpose(b));
    const double c = std::clamp((m[0][0] + m[1][1] + m[2][2] - 1.0) / 2.0, -1.0, 1.0);
    const double expected = std::acos(c) * 180.0 / std::numbers::pi;
    if (expected > 1.0 && expected < 179.0) EXPECT_NEAR(rotation_error(a, b), expected, 1e-9);
  }
}

TEST(RotationErrorTest, MatchesQuaternionOracle) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 1000; ++i) {
    const Mat3 a = random_rotation(rng), b = random_rotation(rng);
    EXPECT_NEAR(rotation_error(a, b), oracle_rotation_angle_deg(a, b), 1e-9);
  }
}

TEST(RotationErrorTest, SymmetricAndLeftInvariant) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const Mat3 a = random_rotation(rng), b = random_rotation(rng), q = random_rotation(rng);
    EXPECT_NEAR(rotation_error(a, b), rotation_error(b, a), 1e-9);
    EXPECT_NEAR(rotation_error(multiply(q, a), multiply(q, b)), rotation_error(a, b), 1e-9);
  }
}

TEST(RotationErrorTest, RejectsNonRotations) {
  const Mat3 scaled{{{2, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  const Mat3 reflection{{{-1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  for (const Mat3& bad : {scaled, reflection}) {
    try {
      rotation_error(bad, kIdentity);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
    }
  }
}

TEST(RotationErrorTest, SpectralDebugMetricIsOneOnRotations) {
  std::mt19937_64 rng(6);
  const Mat3 a = random_rotation(rng), b = random_rotation(rng);
  EXPECT_NEAR(rotation_error_spectral_sq(a, b), 1.0, 1e-12);
}

}  // namespace
}  // namespace oscar

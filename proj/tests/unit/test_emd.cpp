#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "../support/oracles.hpp"
#include "oscar/emd.hpp"
#include "oscar/error.hpp"

namespace oscar {
namespace {

using Points = std::vector<std::vector<double>>;

PointSet to_set(const Points& pts) {
  std::vector<double> flat;
  for (const auto& p : pts) flat.insert(flat.end(), p.begin(), p.end());
  return PointSet(pts.front().size(), flat);
}

Points random_points(std::mt19937_64& rng, int n, int dim) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  Points pts(n, std::vector<double>(dim));
  for (auto& p : pts) {
    for (auto& x : p) x = u(rng);
  }
  return pts;
}

TEST(EmdTest, IdenticalSetsCostNothing) {
  std::mt19937_64 rng(11);
  const Points a = random_points(rng, 6, 3);
  const std::vector<double> w{0.1, 0.3, 0.05, 0.25, 0.2, 0.1};
  EXPECT_EQ(emd(to_set(a), w, to_set(a), w), 0.0);
}

TEST(EmdTest, SinglePointsUseHalfSquaredDistance) {
  const std::vector<double> one{1.0};
  EXPECT_DOUBLE_EQ(emd(to_set({{0, 0}}), one, to_set({{3, 4}}), one), 12.5);
}

TEST(EmdTest, MatchesPermutationOracleOnEqualWeights) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 6;
    const Points a = random_points(rng, n, 2), b = random_points(rng, n, 2);
    const std::vector<double> w(n, 1.0 / n);
    const double expected = testing::oracle_emd_permutations(a, b);
    EXPECT_NEAR(emd(to_set(a), w, to_set(b), w), expected, 1e-9 * std::max(1.0, expected));
  }
}

TEST(EmdTest, HandComputedUnequalMasses) {
  // All of a's mass at the origin, b split between x=1 (0.25) and x=2 (0.75):
  // 0.25 * 0.5 + 0.75 * 2 = 1.625.
  const std::vector<double> wa{1.0}, wb{0.25, 0.75};
  EXPECT_DOUBLE_EQ(emd(to_set({{0.0}}), wa, to_set({{1.0}, {2.0}}), wb), 1.625);
}

TEST(EmdTest, SymmetricAndTranslationInvariant) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> mass(0.1, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Points a = random_points(rng, 5, 3), b = random_points(rng, 4, 3);
    std::vector<double> wa(5), wb(4);
    double sa = 0, sb = 0;
    for (auto& x : wa) sa += (x = mass(rng));
    for (auto& x : wb) sb += (x = mass(rng));
    for (auto& x : wb) x *= sa / sb;
    const double ab = emd(to_set(a), wa, to_set(b), wb);
    EXPECT_GE(ab, 0.0);
    EXPECT_NEAR(ab, emd(to_set(b), wb, to_set(a), wa), 1e-12 * std::max(1.0, ab));

    Points as = a, bs = b;
    for (auto& p : as) p[0] += 7.0, p[2] -= 3.0;
    for (auto& p : bs) p[0] += 7.0, p[2] -= 3.0;
    EXPECT_NEAR(emd(to_set(as), wa, to_set(bs), wb), ab, 1e-9 * std::max(1.0, ab));
  }
}

TEST(EmdTest, TransportPlanHasPrescribedMarginals) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = 7, m = 5;
  std::vector<double> cost(n * m), supply(n), demand(m, 0.0);
  for (auto& c : cost) c = u(rng);
  double total = 0.0;
  for (auto& s : supply) total += (s = u(rng));
  for (std::size_t j = 0; j < m; ++j) demand[j] = total / m;
  const auto plan = solve_transport(cost, supply, demand);
  std::vector<double> out(n, 0.0), in(m, 0.0);
  for (const auto& f : plan.flows) {
    EXPECT_GT(f.mass, 0.0);
    out[f.source] += f.mass;
    in[f.sink] += f.mass;
  }
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(out[i], supply[i], 1e-12);
  for (std::size_t j = 0; j < m; ++j) EXPECT_NEAR(in[j], demand[j], 1e-12);
}

TEST(EmdTest, RejectsUnbalancedOrNegativeMasses) {
  const std::vector<double> one{1.0}, two{2.0}, negative{-1.0};
  for (const auto& [wa, wb] : {std::pair{one, two}, std::pair{negative, negative}}) {
    try {
      emd(to_set({{0.0}}), wa, to_set({{1.0}}), wb);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
    }
  }
}

}  // namespace
}  // namespace oscar

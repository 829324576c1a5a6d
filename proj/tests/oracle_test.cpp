#include "dynkc/oracle.hpp"

#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace dynkc {
namespace {

using testing::line_universe;
using testing::pid;

TEST(Oracle, CostExamples) {
  const MetricUniverse u = testing::worked_universe();
  const std::vector<PointId> active = u.points();
  EXPECT_EQ(cost(active, {pid("p1"), pid("p2"), pid("p3")}, u), 0.0);
  EXPECT_EQ(cost(active, {pid("p2")}, u), 3.0);
  EXPECT_EQ(cost(active, {pid("p3")}, u), 4.0);
  EXPECT_EQ(cost({}, {}, u), 0.0);
  EXPECT_THROW(cost(active, {}, u), ArgumentError);
}

TEST(Oracle, BruteForceSingleCenter) {
  const MetricUniverse u = testing::worked_universe();
  const OracleResult result = brute_force_opt(u.points(), 1, u);
  EXPECT_EQ(result.value, 3.0);
  EXPECT_EQ(result.witness_centers, (std::set<PointId>{pid("p2")}));
  EXPECT_EQ(result.method, OracleResult::Method::Exact);
}

TEST(Oracle, BruteForceTwoCentersLexLeastWitness) {
  const MetricUniverse u = testing::worked_universe();
  const OracleResult result = brute_force_opt(u.points(), 2, u);
  EXPECT_EQ(result.value, 1.0);
  // {p1, p3} and {p2, p3} both reach cost 1; the first in lexicographic
  // order wins.
  EXPECT_EQ(result.witness_centers, (std::set<PointId>{pid("p1"), pid("p3")}));
}

TEST(Oracle, BruteForceKAtLeastUniverse) {
  const MetricUniverse u = testing::worked_universe();
  EXPECT_EQ(brute_force_opt(u.points(), 3, u).value, 0.0);
  EXPECT_EQ(brute_force_opt(u.points(), 7, u).value, 0.0);
}

TEST(Oracle, BruteForceActiveSubset) {
  const MetricUniverse u = testing::worked_universe();
  // Only p2 and p3 active; candidate centers still come from the whole
  // universe.
  const OracleResult result = brute_force_opt({pid("p2"), pid("p3")}, 1, u);
  EXPECT_EQ(result.value, 3.0);
  EXPECT_EQ(result.witness_centers, (std::set<PointId>{pid("p2")}));
}

TEST(Oracle, BruteForceEnumerationCap) {
  std::vector<std::pair<std::string, double>> pts;
  for (int i = 0; i < 12; ++i) {
    pts.emplace_back("q" + std::to_string(i), static_cast<double>(i));
  }
  const MetricUniverse u = line_universe(pts, 16);
  // C(12, 3) = 220 exceeds a cap of 100.
  EXPECT_THROW(brute_force_opt(u.points(), 3, u, 100), ResourceError);
  EXPECT_NO_THROW(brute_force_opt(u.points(), 3, u, 220));
}

TEST(Oracle, BruteForceMonotoneInK) {
  const MetricUniverse u = line_universe(
      {{"a", 0.0}, {"b", 1.0}, {"c", 3.0}, {"d", 6.0}, {"e", 7.5}}, 8);
  double previous = brute_force_opt(u.points(), 1, u).value;
  for (int k = 2; k <= 5; ++k) {
    const double current = brute_force_opt(u.points(), k, u).value;
    EXPECT_LE(current, previous) << "k=" << k;
    previous = current;
  }
}

TEST(Oracle, GonzalezExamples) {
  const MetricUniverse u = testing::worked_universe();
  const OracleResult one = gonzalez(u.points(), 1, u, pid("p1"));
  EXPECT_EQ(one.value, 4.0);
  EXPECT_EQ(one.witness_centers, (std::set<PointId>{pid("p1")}));

  const OracleResult two = gonzalez(u.points(), 2, u, pid("p1"));
  // Farthest from p1@0 is p3@4; remaining worst distance is p2 at 1.
  EXPECT_EQ(two.value, 1.0);
  EXPECT_EQ(two.witness_centers, (std::set<PointId>{pid("p1"), pid("p3")}));

  EXPECT_EQ(gonzalez(u.points(), 5, u).value, 0.0);
  EXPECT_THROW(gonzalez({}, 1, u), ArgumentError);
}

TEST(Oracle, GonzalezDefaultSeedIsSmallestPoint) {
  const MetricUniverse u = testing::worked_universe();
  const OracleResult result = gonzalez(u.points(), 1, u);
  EXPECT_EQ(result.witness_centers, (std::set<PointId>{pid("p1")}));
}

TEST(Oracle, SandwichOnRandomInstances) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 9);
    std::vector<std::pair<std::string, double>> pts;
    std::set<long> used;
    for (int i = 0; i < n; ++i) {
      long coord;
      do {
        coord = static_cast<long>(rng() % 30);
      } while (!used.insert(coord).second);
      pts.emplace_back("r" + std::to_string(i), static_cast<double>(coord));
    }
    const MetricUniverse u = line_universe(pts, 32);
    const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
    const OracleResult exact = brute_force_opt(u.points(), k, u);
    const OracleResult greedy = gonzalez(u.points(), k, u);
    EXPECT_LE(exact.value, greedy.value) << "trial " << trial;
    EXPECT_LE(greedy.value, 2.0 * exact.value) << "trial " << trial;
  }
}

}  // namespace
}  // namespace dynkc

#include "dynkc/clusterer.hpp"

#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "dynkc/harness.hpp"
#include "dynkc/oracle.hpp"
#include "test_support.hpp"

namespace dynkc {
namespace {

using testing::line_universe;
using testing::pid;

UpdateEvent ins(const std::string& name) {
  return {UpdateKind::Insert, PointId{name}};
}
UpdateEvent del(const std::string& name) {
  return {UpdateKind::Delete, PointId{name}};
}

TEST(Clusterer, FreshStateIsEmpty) {
  const Clusterer c(testing::worked_universe(), 2);
  EXPECT_TRUE(c.active_points().empty());
  EXPECT_TRUE(c.centers().empty());
  EXPECT_EQ(c.current_cost(), 0.0);
  EXPECT_EQ(c.recourse_summary().total_steps, 0u);
}

TEST(Clusterer, RejectsBadArguments) {
  EXPECT_THROW(Clusterer(testing::worked_universe(), 0), ArgumentError);
  const MetricUniverse bad = MetricUniverse::from_matrix(
      {pid("a"), pid("b")}, {{0.0, 1.0}, {2.0, 0.0}}, 8);
  EXPECT_THROW(Clusterer(bad, 1), ArgumentError);
}

TEST(Clusterer, WorkedStreamCenters) {
  Clusterer c(testing::worked_universe(), 1);

  auto r1 = c.apply(ins("p1"));
  EXPECT_EQ(c.centers(), (std::vector<PointId>{pid("p1")}));
  EXPECT_EQ(r1.diff.swaps(), 1);

  auto r2 = c.apply(ins("p2"));
  EXPECT_EQ(c.centers(), (std::vector<PointId>{pid("p1")}));
  EXPECT_EQ(r2.diff.swaps(), 0);

  auto r3 = c.apply(ins("p3"));
  EXPECT_EQ(c.centers(), (std::vector<PointId>{pid("p1")}));
  EXPECT_EQ(r3.diff.swaps(), 0);

  auto r4 = c.apply(del("p1"));
  EXPECT_EQ(c.centers(), (std::vector<PointId>{pid("p3")}));
  EXPECT_EQ(r4.diff.added, (std::vector<PointId>{pid("p3")}));
  EXPECT_EQ(r4.diff.removed, (std::vector<PointId>{pid("p1")}));
  EXPECT_EQ(r4.diff.swaps(), 1);
  EXPECT_LE(r4.diff.swaps(), 2);

  const RecourseSummary summary = c.recourse_summary();
  EXPECT_EQ(summary.total_steps, 4u);
  EXPECT_EQ(summary.insertions.steps, 3u);
  EXPECT_EQ(summary.insertions.max_swaps, 1);
  EXPECT_EQ(summary.insertions.mean_swaps, 1.0 / 3.0);
  EXPECT_EQ(summary.insertions.max_symmetric_difference, 1);
  EXPECT_EQ(summary.deletions.steps, 1u);
  EXPECT_EQ(summary.deletions.max_swaps, 1);
  EXPECT_EQ(summary.deletions.mean_swaps, 1.0);
  EXPECT_EQ(summary.deletions.max_symmetric_difference, 2);
}

TEST(Clusterer, InsertBelowKAddsSingleCenter) {
  Clusterer c(testing::worked_universe(), 3);
  const auto result = c.apply(ins("p2"));
  EXPECT_EQ(result.diff.added, (std::vector<PointId>{pid("p2")}));
  EXPECT_TRUE(result.diff.removed.empty());
  EXPECT_EQ(result.diff.swaps(), 1);
  EXPECT_EQ(c.centers(), c.active_points());
}

TEST(Clusterer, CurrentCost) {
  // Inserting p3 first makes it the permanent top smooth rank for k = 1.
  Clusterer c(testing::worked_universe(), 1);
  c.apply(ins("p3"));
  EXPECT_EQ(c.current_cost(), 0.0);  // P = centers
  c.apply(ins("p1"));
  c.apply(ins("p2"));
  EXPECT_EQ(c.centers(), (std::vector<PointId>{pid("p3")}));
  EXPECT_EQ(c.current_cost(), 4.0);  // p1@0 against center p3@4
}

TEST(Clusterer, EventPreconditions) {
  Clusterer c(testing::worked_universe(), 1);
  EXPECT_THROW(c.apply(del("p1")), StateError);
  EXPECT_THROW(c.apply(ins("zz")), LookupError);
  c.apply(ins("p1"));
  EXPECT_THROW(c.apply(ins("p1")), StateError);

  Clusterer close(line_universe({{"a", 0.0}, {"b", 0.5}}, 8), 1);
  close.apply(ins("a"));
  EXPECT_THROW(close.apply(ins("b")), PreconditionError);

  Clusterer far(MetricUniverse::from_matrix({pid("a"), pid("b")},
                                            {{0.0, 10.0}, {10.0, 0.0}}, 8),
                1);
  far.apply(ins("a"));
  EXPECT_THROW(far.apply(ins("b")), PreconditionError);  // 10 > delta
}

// Matrix universe where all pairwise distances are 4: insertion ranks are
// a:4 then 2 for everyone else, giving smooth-rank ties to exercise the
// tie-break rules.
MetricUniverse all_fours() {
  const double d = 4.0;
  return MetricUniverse::from_matrix(
      {pid("a"), pid("b"), pid("c"), pid("d")},
      {{0, d, d, d}, {d, 0, d, d}, {d, d, 0, d}, {d, d, d, 0}}, 8);
}

TEST(Clusterer, TieFavorsIncumbentCenter) {
  Clusterer c(all_fours(), 2);
  c.apply(ins("a"));
  c.apply(ins("b"));
  EXPECT_EQ(c.centers(), (std::vector<PointId>{pid("a"), pid("b")}));
  // b and c tie at smooth rank 2; the incumbent b keeps its seat.
  const auto result = c.apply(ins("c"));
  EXPECT_EQ(c.triple().xi_s.at(pid("b")), c.triple().xi_s.at(pid("c")));
  EXPECT_EQ(c.centers(), (std::vector<PointId>{pid("a"), pid("b")}));
  EXPECT_EQ(result.diff.swaps(), 0);
}

TEST(Clusterer, TieAmongNonIncumbentsBreaksByPointId) {
  Clusterer c(all_fours(), 2);
  c.apply(ins("a"));
  c.apply(ins("b"));
  c.apply(ins("c"));
  c.apply(ins("d"));
  EXPECT_EQ(c.centers(), (std::vector<PointId>{pid("a"), pid("b")}));
  // After b leaves, c and d tie and neither is an incumbent: the smaller
  // PointId wins the free seat.
  const auto result = c.apply(del("b"));
  EXPECT_EQ(c.triple().xi_s.at(pid("c")), c.triple().xi_s.at(pid("d")));
  EXPECT_EQ(c.centers(), (std::vector<PointId>{pid("a"), pid("c")}));
  EXPECT_EQ(result.diff.swaps(), 1);
}

TEST(Clusterer, CentersContainEveryPointAboveCutRank) {
  GenOptions options;
  options.n = 160;
  options.k = 4;
  options.delta = 64;
  options.mode = GenMode::Random;
  options.seed = 5;
  options.max_active = 30;
  const Stream stream = generate_stream(options);
  testing::replay_stream(stream, [](const Clusterer& c, const UpdateEvent&,
                                    const Clusterer::ApplyResult&) {
    const std::vector<PointId> active = c.active_points();
    const std::vector<PointId>& centers = c.centers();
    for (const PointId& center : centers) {
      EXPECT_TRUE(std::binary_search(active.begin(), active.end(), center));
    }
    if (static_cast<int>(active.size()) <= c.k()) {
      EXPECT_EQ(centers, active);
      return;
    }
    EXPECT_EQ(static_cast<int>(centers.size()), c.k());
    const int cut = c.triple().xi_s.ordered_rank(c.k() + 1);
    for (const PointId& p : active) {
      if (c.triple().xi_s.at(p) > cut) {
        EXPECT_TRUE(std::binary_search(centers.begin(), centers.end(), p))
            << p.value << " outranks the cut but is not a center";
      }
    }
  });
}

// Top-k' prefixes of the smooth rank order solve every k' simultaneously.
TEST(Clusterer, AllKSimultaneously24Approximate) {
  GenOptions options;
  options.n = 60;
  options.k = 2;
  options.delta = 16;
  options.mode = GenMode::Random;
  options.seed = 21;
  options.max_active = 9;
  const Stream stream = generate_stream(options);
  testing::replay_stream(stream, [](const Clusterer& c, const UpdateEvent&,
                                    const Clusterer::ApplyResult&) {
    const std::vector<PointId> active = c.active_points();
    const int n = static_cast<int>(active.size());
    for (int kprime = 1; kprime < n; ++kprime) {
      std::vector<PointId> order = active;
      std::sort(order.begin(), order.end(),
                [&](const PointId& x, const PointId& y) {
                  const int rx = c.triple().xi_s.at(x);
                  const int ry = c.triple().xi_s.at(y);
                  if (rx != ry) return rx > ry;
                  return x < y;
                });
      const std::set<PointId> top(order.begin(),
                                  order.begin() + static_cast<std::ptrdiff_t>(kprime));
      const double actual = cost(active, top, c.universe());
      const double optimum = brute_force_opt(active, kprime, c.universe()).value;
      EXPECT_LE(actual, 24.0 * optimum) << "k'=" << kprime;
    }
  });
}

TEST(Clusterer, DeterministicCenterSequences) {
  GenOptions options;
  options.n = 100;
  options.k = 3;
  options.delta = 32;
  options.mode = GenMode::Random;
  options.seed = 11;
  options.max_active = 20;
  const Stream stream = generate_stream(options);
  auto run = [&stream]() {
    std::vector<std::vector<PointId>> sequences;
    testing::replay_stream(stream, [&sequences](const Clusterer& c, const UpdateEvent&,
                                                const Clusterer::ApplyResult&) {
      sequences.push_back(c.centers());
    });
    return sequences;
  };
  EXPECT_EQ(run(), run());
}

}  // namespace
}  // namespace dynkc

#pragma once

// Shared fixtures and test-side oracles. The oracles here recompute expected
// values by direct search, independent of the engine's code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "dynkc/dynkc.hpp"

namespace dynkc::testing {

inline PointId pid(const std::string& s) { return PointId{s}; }

/// One-dimensional Euclidean universe from (name, coordinate) pairs.
inline MetricUniverse line_universe(
    const std::vector<std::pair<std::string, double>>& pts, std::int64_t delta) {
  std::vector<std::pair<PointId, std::vector<double>>> converted;
  converted.reserve(pts.size());
  for (const auto& [name, x] : pts) {
    converted.emplace_back(PointId{name}, std::vector<double>{x});
  }
  return MetricUniverse::euclidean(1, converted, delta);
}

/// The worked three-point universe: p1@0, p2@1, p3@4 with delta 8.
inline MetricUniverse worked_universe() {
  return line_universe({{"p1", 0.0}, {"p2", 1.0}, {"p3", 4.0}}, 8);
}

inline const char* worked_stream_text() {
  return R"({"type":"header","k":1,"delta":8,"metric":"euclidean","dim":1}
{"type":"insert","id":"p1","coords":[0]}
{"type":"insert","id":"p2","coords":[1]}
{"type":"insert","id":"p3","coords":[4]}
{"type":"delete","id":"p1"}
)";
}

/// Independent evaluation of the insertion rank: the largest i in [0, cap]
/// such that every active point p satisfies d(q, p) >= 2^min(i, rank(p)).
inline int brute_force_insert_rank(const TripleState& s, const PointId& q,
                                   const MetricUniverse& u) {
  const int cap = u.rank_cap();
  for (int i = cap; i >= 0; --i) {
    bool fits = true;
    for (const auto& [p, rank] : s.xi_g.entries()) {
      if (u.distance(q, p) < std::pow(2.0, std::min(i, rank))) {
        fits = false;
        break;
      }
    }
    if (fits) return i;
  }
  return -1;  // unreachable when the minimum-distance precondition holds
}

/// Asserts the full set of state invariants the engine promises between
/// top-level updates.
inline void expect_state_valid(const TripleState& s, const MetricUniverse& u,
                               const std::string& context) {
  const ValidationReport structure = s.forest.validate_structure();
  EXPECT_TRUE(structure.ok()) << context << ": " << structure.violations.front();
  const ValidationReport triple = check_valid_triple(s.forest, s.xi_g, s.xi_s, u);
  EXPECT_TRUE(triple.ok()) << context << ": " << triple.violations.front();
  const auto separation = check_separation(s.xi_g, u);
  EXPECT_TRUE(separation.empty())
      << context << ": separation violated by (" << separation.empty()
      << " pairs)";
  const auto maximality = check_maximality(s.xi_g, u);
  EXPECT_TRUE(maximality.empty())
      << context << ": " << (maximality.empty() ? "" : maximality.front().value)
      << " is not maximal";
  const ValidationReport tuple = check_valid_tuple(s.xi_g, s.xi_s, u);
  EXPECT_TRUE(tuple.ok()) << context << ": " << tuple.violations.front();
  const ValidationReport diameter = subtree_diameter_bound_check(s.forest, s.xi_g, u);
  EXPECT_TRUE(diameter.ok()) << context << ": " << diameter.violations.front();
  if (!s.empty()) {
    bool witness = false;
    for (const auto& [p, r] : s.xi_g.entries()) {
      if (r >= u.rank_cap()) witness = true;
    }
    EXPECT_TRUE(witness) << context << ": no cap-rank witness";
  }
}

inline std::map<PointId, int> rank_map(const RankFunction& xi) {
  return xi.entries();
}

/// Replays a stream through a fresh clusterer, invoking `fn(clusterer, event,
/// result)` after every applied step.
template <typename PerStep>
void replay_stream(const Stream& stream, PerStep&& fn) {
  Clusterer clusterer(build_universe(stream), stream.header.k);
  for (const StreamEvent& event : stream.events) {
    UpdateEvent update;
    update.kind = event.kind == StreamEventKind::Insert ? UpdateKind::Insert
                                                        : UpdateKind::Delete;
    update.point = event.id;
    Clusterer::ApplyResult result = clusterer.apply(update);
    fn(clusterer, update, result);
  }
}

}  // namespace dynkc::testing

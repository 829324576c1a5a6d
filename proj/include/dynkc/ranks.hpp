#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dynkc/errors.hpp"
#include "dynkc/metric.hpp"
#include "dynkc/report.hpp"

namespace dynkc {

/// Assignment of a nonnegative integer rank to every active point.
/// The engine keeps two instances: the geometric rank (drives separation and
/// maximality) and the smooth rank (drives center selection).
class RankFunction {
 public:
  using Map = std::map<PointId, int>;

  RankFunction() = default;

  explicit RankFunction(Map assignment) : ranks_(std::move(assignment)) {
    for (const auto& [p, r] : ranks_) {
      if (r < 0) throw ArgumentError("rank of " + p.value + " is negative");
    }
  }

  bool empty() const noexcept { return ranks_.empty(); }
  std::size_t size() const noexcept { return ranks_.size(); }
  bool contains(const PointId& p) const { return ranks_.count(p) > 0; }

  int at(const PointId& p) const {
    auto it = ranks_.find(p);
    if (it == ranks_.end()) throw LookupError("rank: unknown point " + p.value);
    return it->second;
  }

  void assign(const PointId& p, int rank) {
    if (rank < 0) throw ArgumentError("rank of " + p.value + " must be nonnegative");
    ranks_[p] = rank;
  }

  void erase(const PointId& p) {
    if (ranks_.erase(p) == 0) throw LookupError("rank erase: unknown point " + p.value);
  }

  const Map& entries() const noexcept { return ranks_; }

  /// Domain in ascending PointId order.
  std::vector<PointId> points() const {
    std::vector<PointId> out;
    out.reserve(ranks_.size());
    for (const auto& [p, r] : ranks_) out.push_back(p);
    return out;
  }

  /// All ranks sorted in nonincreasing order.
  std::vector<int> ordered() const {
    std::vector<int> out;
    out.reserve(ranks_.size());
    for (const auto& [p, r] : ranks_) out.push_back(r);
    std::sort(out.begin(), out.end(), std::greater<int>());
    return out;
  }

  /// The i-th largest rank, 1-indexed.
  int ordered_rank(int i) const {
    if (i < 1 || i > static_cast<int>(ranks_.size())) {
      throw ArgumentError("ordered_rank: index " + std::to_string(i) +
                          " out of range for " + std::to_string(ranks_.size()) +
                          " points");
    }
    return ordered()[static_cast<std::size_t>(i - 1)];
  }

  friend bool operator==(const RankFunction&, const RankFunction&) = default;

 private:
  Map ranks_;
};

/// Every unordered pair {p1, p2} with d(p1, p2) < 2^min(rank(p1), rank(p2)).
/// Empty result means the separation property holds.
inline std::vector<std::pair<PointId, PointId>> check_separation(
    const RankFunction& xi, const MetricUniverse& u) {
  std::vector<std::pair<PointId, PointId>> violations;
  const auto& entries = xi.entries();
  for (auto it = entries.begin(); it != entries.end(); ++it) {
    for (auto jt = std::next(it); jt != entries.end(); ++jt) {
      const int r = std::min(it->second, jt->second);
      if (u.distance(it->first, jt->first) < power_of_two(r)) {
        violations.emplace_back(it->first, jt->first);
      }
    }
  }
  return violations;
}

/// Every point that is neither the unique strict maximum of the rank function
/// nor within distance < 2^(rank+1) of some strictly higher-ranked point.
inline std::vector<PointId> check_maximality(const RankFunction& xi,
                                             const MetricUniverse& u) {
  std::vector<PointId> violations;
  const auto& entries = xi.entries();
  for (const auto& [p, rp] : entries) {
    bool unique_max = true;
    bool witnessed = false;
    for (const auto& [q, rq] : entries) {
      if (q == p) continue;
      if (rq >= rp) unique_max = false;
      if (rq > rp && u.distance(p, q) < power_of_two(rp + 1)) witnessed = true;
    }
    if (!unique_max && !witnessed) violations.push_back(p);
  }
  return violations;
}

/// Checks the three valid-tuple properties for a pair of rank functions:
/// separation + maximality of the geometric rank, ordered-rank dominance, and
/// smooth witnesses within 4*2^r of every point of geometric rank >= r.
/// Ranks never exceed rank_cap(delta), so r only needs to run up to the cap.
inline ValidationReport check_valid_tuple(const RankFunction& xi_g,
                                          const RankFunction& xi_s,
                                          const MetricUniverse& u) {
  ValidationReport report;
  if (xi_g.points() != xi_s.points()) {
    report.add("domains of the two rank functions differ");
    return report;
  }
  for (const auto& [p, q] : check_separation(xi_g, u)) {
    report.add("property 1: separation violated by (" + p.value + ", " + q.value + ")");
  }
  for (const PointId& p : check_maximality(xi_g, u)) {
    report.add("property 1: point " + p.value + " is not maximal");
  }
  const int n = static_cast<int>(xi_g.size());
  if (n > 0) {
    const std::vector<int> og = xi_g.ordered();
    const std::vector<int> os = xi_s.ordered();
    for (int i = 1; i <= n; ++i) {
      if (og[i - 1] < os[i - 1]) {
        report.add("property 2: ordered rank dominance fails at i=" + std::to_string(i) +
                   " (geometric " + std::to_string(og[i - 1]) + " < smooth " +
                   std::to_string(os[i - 1]) + ")");
      }
    }
  }
  const int cap = u.rank_cap();
  for (int r = 0; r <= cap; ++r) {
    const double reach = 4.0 * power_of_two(r);
    for (const auto& [p, rp] : xi_g.entries()) {
      if (rp < r) continue;
      bool found = false;
      for (const auto& [q, sq] : xi_s.entries()) {
        if (sq >= r && u.distance(p, q) <= reach) {
          found = true;
          break;
        }
      }
      if (!found) {
        report.add("property 3: no smooth witness for (r=" + std::to_string(r) +
                   ", p=" + p.value + ")");
      }
    }
  }
  return report;
}

/// Lower bound 0.5 * 2^(xi*(k+1)) on the optimal k-center cost, valid whenever
/// xi satisfies the separation property.
inline double opt_lower_bound(const RankFunction& xi, int k) {
  if (k < 1) throw ArgumentError("opt_lower_bound: k must be at least 1");
  if (k >= static_cast<int>(xi.size())) {
    throw ArgumentError("opt_lower_bound: k must be at most |P| - 1");
  }
  return 0.5 * power_of_two(xi.ordered_rank(k + 1));
}

}  // namespace dynkc

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dynkc/errors.hpp"
#include "dynkc/metric.hpp"

namespace dynkc {

inline constexpr std::uint64_t kDefaultEnumerationCap = 2'000'000;

/// Ground-truth result computed by test-side search, independent of the
/// engine's own data structures.
struct OracleResult {
  enum class Method { Exact, Gonzalez };

  double value = 0.0;
  std::set<PointId> witness_centers;
  Method method = Method::Exact;
};

/// COST(P, C): the largest distance from an active point to its nearest
/// center.
inline double cost(const std::vector<PointId>& active,
                   const std::set<PointId>& centers, const MetricUniverse& u) {
  if (active.empty()) return 0.0;
  if (centers.empty()) {
    throw ArgumentError("cost: no centers for a nonempty point set");
  }
  double worst = 0.0;
  for (const PointId& p : active) {
    double best = std::numeric_limits<double>::infinity();
    for (const PointId& c : centers) {
      best = std::min(best, u.distance(p, c));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

namespace detail {

inline std::uint64_t binomial_clamped(std::uint64_t n, std::uint64_t k,
                                      std::uint64_t limit) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    if (result > limit) return limit + 1;
    result = result * (n - k + i) / i;
  }
  return result;
}

}  // namespace detail

/// Exact optimum by enumerating every min(k, |X|)-subset of the declared
/// universe in lexicographic order; the witness is the lexicographically least
/// minimizer. Refuses instances whose subset count exceeds the cap.
inline OracleResult brute_force_opt(const std::vector<PointId>& active, int k,
                                    const MetricUniverse& u,
                                    std::uint64_t enumeration_cap = kDefaultEnumerationCap) {
  if (k < 1) throw ArgumentError("brute_force_opt: k must be at least 1");
  const std::vector<PointId>& candidates = u.points();
  for (const PointId& p : active) {
    if (!u.contains(p)) throw LookupError("brute_force_opt: unknown point " + p.value);
  }
  const std::size_t n = candidates.size();
  const std::size_t pick = std::min<std::size_t>(static_cast<std::size_t>(k), n);
  OracleResult result;
  result.method = OracleResult::Method::Exact;
  if (n == 0 || active.empty()) return result;
  if (detail::binomial_clamped(n, pick, enumeration_cap) > enumeration_cap) {
    throw ResourceError("brute_force_opt: C(" + std::to_string(n) + ", " +
                        std::to_string(pick) + ") exceeds the enumeration cap");
  }
  std::vector<std::size_t> idx(pick);
  for (std::size_t i = 0; i < pick; ++i) idx[i] = i;
  double best = std::numeric_limits<double>::infinity();
  std::set<PointId> best_centers;
  while (true) {
    std::set<PointId> centers;
    for (std::size_t i : idx) centers.insert(candidates[i]);
    const double c = cost(active, centers, u);
    if (c < best) {
      best = c;
      best_centers = centers;
    }
    // next combination in lexicographic order
    std::size_t pos = pick;
    while (pos > 0 && idx[pos - 1] == n - pick + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t i = pos; i < pick; ++i) idx[i] = idx[i - 1] + 1;
  }
  result.value = best;
  result.witness_centers = std::move(best_centers);
  return result;
}

/// Farthest-first traversal over the active points: a 2-approximation of the
/// optimum. Ties in the farthest choice go to the smallest PointId; the seed
/// defaults to the smallest active point.
inline OracleResult gonzalez(const std::vector<PointId>& active, int k,
                             const MetricUniverse& u,
                             std::optional<PointId> seed_point = std::nullopt) {
  if (k < 1) throw ArgumentError("gonzalez: k must be at least 1");
  if (active.empty()) throw ArgumentError("gonzalez: empty point set");
  std::vector<PointId> pts = active;
  std::sort(pts.begin(), pts.end());
  const PointId seed = seed_point ? *seed_point : pts.front();
  if (std::find(pts.begin(), pts.end(), seed) == pts.end()) {
    throw ArgumentError("gonzalez: seed point " + seed.value + " is not active");
  }
  OracleResult result;
  result.method = OracleResult::Method::Gonzalez;
  std::set<PointId> centers{seed};
  while (static_cast<int>(centers.size()) < k &&
         centers.size() < pts.size()) {
    PointId farthest = pts.front();
    double farthest_distance = -1.0;
    for (const PointId& p : pts) {
      if (centers.count(p) > 0) continue;
      double nearest = std::numeric_limits<double>::infinity();
      for (const PointId& c : centers) {
        nearest = std::min(nearest, u.distance(p, c));
      }
      if (nearest > farthest_distance) {
        farthest_distance = nearest;
        farthest = p;
      }
    }
    centers.insert(farthest);
  }
  result.value = cost(pts, centers, u);
  result.witness_centers = std::move(centers);
  return result;
}

}  // namespace dynkc

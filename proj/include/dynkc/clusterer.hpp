#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dynkc/core_ops.hpp"
#include "dynkc/errors.hpp"
#include "dynkc/metric.hpp"

namespace dynkc {

enum class UpdateKind { Insert, Delete };

inline std::string to_string(UpdateKind kind) {
  return kind == UpdateKind::Insert ? "insert" : "delete";
}

/// One stream step: the point set changes by exactly this point.
struct UpdateEvent {
  UpdateKind kind = UpdateKind::Insert;
  PointId point;
};

/// Center-set movement of one step. A swap replaces one center by another, so
/// the swap count is the larger side of the symmetric difference.
struct CenterDiff {
  std::vector<PointId> added;
  std::vector<PointId> removed;

  int swaps() const {
    return static_cast<int>(std::max(added.size(), removed.size()));
  }
  int symmetric_difference() const {
    return static_cast<int>(added.size() + removed.size());
  }
};

struct RecourseSummary {
  struct PerKind {
    std::uint64_t steps = 0;
    int max_swaps = 0;
    double mean_swaps = 0.0;
    int max_symmetric_difference = 0;
  };

  PerKind insertions;
  PerKind deletions;
  std::uint64_t total_steps = 0;
};

/// Top-level maintainer of a consistent k-center solution. Owns the triple
/// state, derives the center set from the k largest smooth ranks, and records
/// recourse per step. Updates must be applied by a single owner at a time.
class Clusterer {
 public:
  struct ApplyResult {
    CenterDiff diff;
    SmoothRankDelta smooth_delta;
  };

  Clusterer(MetricUniverse universe, int k)
      : universe_(std::move(universe)), k_(k) {
    if (k < 1) throw ArgumentError("clusterer: k must be at least 1");
    const ValidationReport report = validate_universe(universe_, {});
    if (!report.ok()) {
      throw ArgumentError("clusterer: invalid universe: " + report.violations.front());
    }
  }

  ApplyResult apply(const UpdateEvent& event) {
    SmoothRankDelta delta;
    if (event.kind == UpdateKind::Insert) {
      if (!universe_.contains(event.point)) {
        throw LookupError("insert: unknown point " + event.point.value);
      }
      if (triple_.forest.has_leaf(event.point)) {
        throw StateError("insert: point " + event.point.value + " already active");
      }
      const double delta_bound = static_cast<double>(universe_.delta());
      for (const PointId& p : triple_.forest.points()) {
        const double d = universe_.distance(event.point, p);
        if (d < 1.0 || d > delta_bound) {
          throw PreconditionError("insert: distance between " + event.point.value +
                                  " and " + p.value + " is outside [1, delta]");
        }
      }
      delta = insert_point(triple_, event.point, universe_);
    } else {
      if (!triple_.forest.has_leaf(event.point)) {
        throw StateError("delete: point " + event.point.value + " not active");
      }
      delta = delete_point(triple_, event.point, universe_);
    }
    std::vector<PointId> next = select_centers();
    CenterDiff diff;
    std::set_difference(next.begin(), next.end(), centers_.begin(), centers_.end(),
                        std::back_inserter(diff.added));
    std::set_difference(centers_.begin(), centers_.end(), next.begin(), next.end(),
                        std::back_inserter(diff.removed));
    centers_ = std::move(next);
    ++total_steps_;
    Tally& tally = event.kind == UpdateKind::Insert ? insert_tally_ : delete_tally_;
    ++tally.steps;
    tally.swap_total += static_cast<std::uint64_t>(diff.swaps());
    tally.max_swaps = std::max(tally.max_swaps, diff.swaps());
    tally.max_symm = std::max(tally.max_symm, diff.symmetric_difference());
    return {std::move(diff), std::move(delta)};
  }

  /// Largest distance from an active point to the current centers; zero for
  /// the empty point set.
  double current_cost() const {
    const std::vector<PointId> active = triple_.forest.points();
    if (active.empty()) return 0.0;
    double worst = 0.0;
    for (const PointId& p : active) {
      double nearest = std::numeric_limits<double>::infinity();
      for (const PointId& c : centers_) {
        nearest = std::min(nearest, universe_.distance(p, c));
      }
      worst = std::max(worst, nearest);
    }
    return worst;
  }

  RecourseSummary recourse_summary() const {
    RecourseSummary summary;
    summary.total_steps = total_steps_;
    summary.insertions = finish(insert_tally_);
    summary.deletions = finish(delete_tally_);
    return summary;
  }

  /// Current centers in ascending PointId order.
  const std::vector<PointId>& centers() const noexcept { return centers_; }
  std::vector<PointId> active_points() const { return triple_.forest.points(); }
  const TripleState& triple() const noexcept { return triple_; }
  const MetricUniverse& universe() const noexcept { return universe_; }
  int k() const noexcept { return k_; }
  std::uint64_t step_count() const noexcept { return total_steps_; }

 private:
  struct Tally {
    std::uint64_t steps = 0;
    std::uint64_t swap_total = 0;
    int max_swaps = 0;
    int max_symm = 0;
  };

  static RecourseSummary::PerKind finish(const Tally& tally) {
    RecourseSummary::PerKind out;
    out.steps = tally.steps;
    out.max_swaps = tally.max_swaps;
    out.max_symmetric_difference = tally.max_symm;
    out.mean_swaps = tally.steps == 0
                         ? 0.0
                         : static_cast<double>(tally.swap_total) /
                               static_cast<double>(tally.steps);
    return out;
  }

  /// Everything when |P| <= k; otherwise the k points of largest smooth rank,
  /// ties broken first toward the previous center set and then by ascending
  /// PointId.
  std::vector<PointId> select_centers() const {
    std::vector<PointId> active = triple_.forest.points();
    if (static_cast<int>(active.size()) <= k_) return active;
    std::vector<PointId> order = active;
    std::sort(order.begin(), order.end(), [this](const PointId& a, const PointId& b) {
      const int ra = triple_.xi_s.at(a);
      const int rb = triple_.xi_s.at(b);
      if (ra != rb) return ra > rb;
      const bool ia = std::binary_search(centers_.begin(), centers_.end(), a);
      const bool ib = std::binary_search(centers_.begin(), centers_.end(), b);
      if (ia != ib) return ia;
      return a < b;
    });
    order.resize(static_cast<std::size_t>(k_));
    std::sort(order.begin(), order.end());
    return order;
  }

  MetricUniverse universe_;
  int k_;
  TripleState triple_;
  std::vector<PointId> centers_;
  std::uint64_t total_steps_ = 0;
  Tally insert_tally_;
  Tally delete_tally_;
};

}  // namespace dynkc

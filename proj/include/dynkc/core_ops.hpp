#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dynkc/errors.hpp"
#include "dynkc/leveled_forest.hpp"
#include "dynkc/metric.hpp"
#include "dynkc/ranks.hpp"

namespace dynkc {

/// The triple the engine maintains: a leveled forest plus the geometric and
/// smooth rank functions over the active points. Between top-level updates the
/// geometric rank additionally satisfies maximality and, for nonempty point
/// sets, some point carries the cap rank.
struct TripleState {
  LeveledForest forest;
  RankFunction xi_g;
  RankFunction xi_s;

  bool empty() const noexcept { return forest.empty(); }
  std::vector<PointId> active_points() const { return forest.points(); }

  friend bool operator==(const TripleState&, const TripleState&) = default;
};

struct RankChange {
  PointId point;
  int old_rank = 0;
  int new_rank = 0;

  friend bool operator==(const RankChange&, const RankChange&) = default;
};

/// Net smooth-rank movement of one top-level operation. `removed` carries the
/// deleted point together with the smooth rank it held before the operation;
/// it counts as a downward crossing at every level up to that rank.
struct SmoothRankDelta {
  std::vector<RankChange> raised;
  std::vector<RankChange> lowered;
  std::optional<RankChange> removed;

  /// Points other than the deleted one whose smooth rank crossed level h
  /// upward.
  int raises_across(int h) const {
    int count = 0;
    for (const RankChange& c : raised) {
      if (c.old_rank < h && c.new_rank >= h) ++count;
    }
    return count;
  }

  /// Downward crossings of level h, counting the deleted point at every level
  /// up to its former smooth rank.
  int drops_across(int h) const {
    int count = 0;
    for (const RankChange& c : lowered) {
      if (c.old_rank >= h && c.new_rank < h) ++count;
    }
    if (removed && removed->old_rank >= h) ++count;
    return count;
  }

  bool preexisting_unchanged() const {
    return raised.empty() && lowered.empty() && !removed;
  }

  friend bool operator==(const SmoothRankDelta&, const SmoothRankDelta&) = default;
};

namespace detail {

/// Folds per-suboperation smooth-rank updates into net old/new values.
class SmoothDeltaBuilder {
 public:
  void record(const PointId& p, int old_rank, int new_rank) {
    auto it = changes_.find(p);
    if (it == changes_.end()) {
      changes_.emplace(p, std::make_pair(old_rank, new_rank));
    } else {
      it->second.second = new_rank;
    }
  }

  SmoothRankDelta finish(const std::optional<PointId>& removed_point = std::nullopt,
                         int removed_old_rank = 0) const {
    SmoothRankDelta delta;
    for (const auto& [p, change] : changes_) {
      if (removed_point && p == *removed_point) continue;
      const auto [oldr, newr] = change;
      if (newr > oldr) {
        delta.raised.push_back({p, oldr, newr});
      } else if (newr < oldr) {
        delta.lowered.push_back({p, oldr, newr});
      }
    }
    if (removed_point) {
      delta.removed = RankChange{*removed_point, removed_old_rank, 0};
    }
    return delta;
  }

 private:
  std::map<PointId, std::pair<int, int>> changes_;
};

/// The unique leaf in the subtree of v whose smooth rank reaches the height
/// of v. Valid triples guarantee existence and uniqueness.
inline PointId unique_smooth_holder(const LeveledForest& f, const RankFunction& xi_s,
                                    NodeId v) {
  const int h = f.height(v);
  std::optional<PointId> holder;
  int count = 0;
  for (const PointId& p : f.subtree_points(v)) {
    if (xi_s.at(p) >= h) {
      if (!holder) holder = p;
      ++count;
    }
  }
  if (count != 1) {
    throw StateError("smooth-holder invariant broken at node #" +
                     std::to_string(v.value) + " (found " + std::to_string(count) +
                     ")");
  }
  return *holder;
}

/// Deterministic stand-in for "an arbitrary child of v other than u": the
/// child whose subtree holds the smallest point, ties by node id.
inline NodeId pick_other_child(const LeveledForest& f, NodeId v, NodeId u) {
  std::optional<NodeId> best;
  std::optional<PointId> best_point;
  for (NodeId c : f.node(v).children) {
    if (c == u) continue;
    const PointId candidate = f.min_point_in_subtree(c);
    if (!best || candidate < *best_point ||
        (candidate == *best_point && c < *best)) {
      best = c;
      best_point = candidate;
    }
  }
  if (!best) throw StateError("pick_other_child: no other child exists");
  return *best;
}

inline void rank_decrease_impl(TripleState& s, const PointId& q,
                               SmoothDeltaBuilder& builder) {
  const int gq = s.xi_g.at(q);
  if (gq < 1) {
    throw PreconditionError("rank_decrease: geometric rank of " + q.value +
                            " is already 0");
  }
  const NodeId u_node = s.forest.ancestor_at_height(q, gq - 1);
  const NodeId v_node = s.forest.ancestor_at_height(q, gq);
  const PointId holder = unique_smooth_holder(s.forest, s.xi_s, v_node);
  s.xi_g.assign(q, gq - 1);
  if (s.forest.node(v_node).children.size() == 1) {
    const int old_rank = s.xi_s.at(holder);
    s.forest.detach_edge(u_node, v_node, /*delete_parent_if_childless=*/true);
    s.xi_s.assign(holder, gq - 1);
    builder.record(holder, old_rank, gq - 1);
  } else {
    const NodeId sibling = pick_other_child(s.forest, v_node, u_node);
    const bool holder_under_u = s.forest.ancestor_at_height(holder, gq - 1) == u_node;
    if (holder_under_u) {
      const PointId sibling_holder = unique_smooth_holder(s.forest, s.xi_s, sibling);
      const int holder_old = s.xi_s.at(holder);
      const int sibling_old = s.xi_s.at(sibling_holder);
      s.xi_s.assign(holder, gq - 1);
      builder.record(holder, holder_old, gq - 1);
      s.xi_s.assign(sibling_holder, holder_old);
      builder.record(sibling_holder, sibling_old, holder_old);
    }
    s.forest.detach_edge(u_node, v_node, /*delete_parent_if_childless=*/false);
  }
}

inline void delete_without_maximality_impl(TripleState& s, const PointId& q,
                                           SmoothDeltaBuilder& builder) {
  const int start_rank = s.xi_g.at(q);
  for (int step = 0; step < start_rank; ++step) {
    rank_decrease_impl(s, q, builder);
  }
  s.forest.remove_isolated_leaf(q);
  s.xi_g.erase(q);
  s.xi_s.erase(q);
}

inline void group_increase_impl(TripleState& s, const std::vector<PointId>& members,
                                int h, const MetricUniverse& u,
                                SmoothDeltaBuilder& builder) {
  if (members.empty()) return;
  if (h < 0) throw ArgumentError("group_increase: negative level");
  const double lower = power_of_two(h + 1);
  const double upper = power_of_two(h + 2);
  std::vector<std::size_t> member_idx;
  member_idx.reserve(members.size());
  for (const PointId& m : members) {
    if (!s.forest.has_leaf(m)) {
      throw StateError("group_increase: point " + m.value + " is not active");
    }
    if (s.xi_g.at(m) != h) {
      throw PreconditionError("group_increase: point " + m.value +
                              " has geometric rank " + std::to_string(s.xi_g.at(m)) +
                              ", expected " + std::to_string(h));
    }
    member_idx.push_back(u.index_of(m));
  }
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      const double d = u.distance_by_index(member_idx[i], member_idx[j]);
      if (d < lower || d >= upper) {
        throw PreconditionError("group_increase: pair (" + members[i].value + ", " +
                                members[j].value + ") at distance " +
                                detail::format_distance(d) +
                                " outside [2^" + std::to_string(h + 1) + ", 2^" +
                                std::to_string(h + 2) + ")");
      }
    }
  }
  for (const auto& [p, rank] : s.xi_g.entries()) {
    if (std::binary_search(members.begin(), members.end(), p)) continue;
    const double needed = power_of_two(std::min(h + 1, rank));
    const std::size_t p_idx = u.index_of(p);
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (u.distance_by_index(member_idx[i], p_idx) < needed) {
        throw PreconditionError("group_increase: member " + members[i].value +
                                " too close to outsider " + p.value);
      }
    }
  }
  std::vector<NodeId> roots;
  roots.reserve(members.size());
  for (const PointId& m : members) {
    const NodeId r = s.forest.root_of(s.forest.leaf(m));
    if (s.forest.height(r) != h) {
      throw StateError("group_increase: root of " + m.value +
                       " does not sit at height " + std::to_string(h));
    }
    roots.push_back(r);
  }
  // Smooth promotion goes to the holder in the tree of the smallest member.
  const PointId promoted =
      unique_smooth_holder(s.forest, s.xi_s, roots.front());
  s.forest.attach_new_parent(roots);
  for (const PointId& m : members) s.xi_g.assign(m, h + 1);
  const int old_rank = s.xi_s.at(promoted);
  s.xi_s.assign(promoted, h + 1);
  builder.record(promoted, old_rank, h + 1);
}

}  // namespace detail

/// Inserts q: picks the largest rank that keeps separation against the active
/// points, grows a fresh path of that length, and gives q that rank in both
/// functions. No other rank changes.
inline SmoothRankDelta insert_point(TripleState& s, const PointId& q,
                                    const MetricUniverse& u) {
  if (s.forest.has_leaf(q)) {
    throw StateError("insert: point " + q.value + " already active");
  }
  if (!u.contains(q)) throw LookupError("insert: unknown point " + q.value);
  const int cap = u.rank_cap();
  const std::size_t q_idx = u.index_of(q);
  int new_rank = cap;
  for (const auto& [p, rank] : s.xi_g.entries()) {
    const double d = u.distance_by_index(q_idx, u.index_of(p));
    if (d < 1.0) {
      throw PreconditionError("insert: distance between " + q.value + " and " +
                              p.value + " is below 1");
    }
    int allowed;
    if (d >= power_of_two(rank)) {
      allowed = cap;
    } else {
      allowed = 0;
      while (allowed + 1 <= cap && power_of_two(allowed + 1) <= d) ++allowed;
    }
    new_rank = std::min(new_rank, allowed);
  }
  s.forest.add_leaf_with_path(q, new_rank);
  s.xi_g.assign(q, new_rank);
  s.xi_s.assign(q, new_rank);
  return {};
}

/// Lowers the geometric rank of q by one and performs the matching forest
/// surgery. At most one smooth rank drops and at most one rises.
inline SmoothRankDelta rank_decrease(TripleState& s, const PointId& q,
                                     const MetricUniverse&) {
  if (!s.forest.has_leaf(q)) {
    throw StateError("rank_decrease: point " + q.value + " not active");
  }
  detail::SmoothDeltaBuilder builder;
  detail::rank_decrease_impl(s, q, builder);
  return builder.finish();
}

/// Removes q by decreasing its rank to zero and dropping the isolated leaf.
/// No other geometric rank changes; the result is a valid triple but the
/// geometric rank may have lost maximality.
inline SmoothRankDelta delete_without_maximality(TripleState& s, const PointId& q,
                                                 const MetricUniverse&) {
  if (!s.forest.has_leaf(q)) {
    throw StateError("delete: point " + q.value + " not active");
  }
  const int old_smooth = s.xi_s.at(q);
  detail::SmoothDeltaBuilder builder;
  detail::delete_without_maximality_impl(s, q, builder);
  return builder.finish(q, old_smooth);
}

/// Promotes a batch of rank-h points under one new forest node. The batch must
/// be pairwise in [2^(h+1), 2^(h+2)) and far enough from every outsider.
inline SmoothRankDelta group_increase(TripleState& s, std::vector<PointId> group,
                                      int h, const MetricUniverse& u) {
  std::sort(group.begin(), group.end());
  group.erase(std::unique(group.begin(), group.end()), group.end());
  detail::SmoothDeltaBuilder builder;
  detail::group_increase_impl(s, group, h, u, builder);
  return builder.finish();
}

/// Full deletion: removes q, then restores maximality level by level by
/// promoting maximal batches. Batch membership is greedy in ascending PointId
/// order, which fixes the one choice the procedure leaves open.
inline SmoothRankDelta delete_point(TripleState& s, const PointId& q,
                                    const MetricUniverse& u) {
  if (!s.forest.has_leaf(q)) {
    throw StateError("delete: point " + q.value + " not active");
  }
  const int old_smooth = s.xi_s.at(q);
  detail::SmoothDeltaBuilder builder;
  detail::delete_without_maximality_impl(s, q, builder);
  const int cap = u.rank_cap();
  for (int level = 0; level < cap; ++level) {
    const double gap = power_of_two(level + 1);
    // Only points of rank > level can block admission: an outsider of rank
    // r <= level needs distance 2^r, which the separation property of the
    // current geometric rank already provides. For everything else the
    // required distance is exactly 2^(level + 1). The full admission
    // predicate is re-validated against all outsiders inside group_increase.
    std::vector<PointId> candidates;  // ascending: entries() is id-sorted
    std::vector<std::size_t> candidate_idx;
    std::vector<std::size_t> blocker_idx;
    for (const auto& [p, rank] : s.xi_g.entries()) {
      if (rank == level) {
        candidates.push_back(p);
        candidate_idx.push_back(u.index_of(p));
      } else if (rank > level) {
        blocker_idx.push_back(u.index_of(p));
      }
    }
    std::vector<PointId> group;
    std::vector<std::size_t> group_idx;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      bool admissible = true;
      for (const std::size_t member : group_idx) {
        if (u.distance_by_index(candidate_idx[c], member) < gap) {
          admissible = false;
          break;
        }
      }
      if (admissible) {
        for (const std::size_t blocker : blocker_idx) {
          if (u.distance_by_index(candidate_idx[c], blocker) < gap) {
            admissible = false;
            break;
          }
        }
      }
      if (admissible) {
        group.push_back(candidates[c]);
        group_idx.push_back(candidate_idx[c]);
      }
    }
    detail::group_increase_impl(s, group, level, u, builder);
  }
  return builder.finish(q, old_smooth);
}

}  // namespace dynkc

#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dynkc/errors.hpp"
#include "dynkc/metric.hpp"
#include "dynkc/ranks.hpp"
#include "dynkc/report.hpp"

namespace dynkc {

/// Handle of a forest node. Ids come from a monotone counter and are never
/// reused within a run.
struct NodeId {
  std::uint64_t value = 0;

  auto operator<=>(const NodeId&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const NodeId& id) {
  return os << '#' << id.value;
}

/// Rooted forest whose leaves are the active points. Edges are oriented child
/// to parent, all leaves of a tree sit at the same distance from its root, and
/// each node stores its height (edge distance to the leaves of its subtree).
/// Heights are maintained incrementally by the mutators; validate_structure
/// recomputes them.
class LeveledForest {
 public:
  struct Node {
    std::optional<NodeId> parent;
    std::vector<NodeId> children;
    int height = 0;
    std::optional<PointId> point;

    friend bool operator==(const Node&, const Node&) = default;
  };

  bool empty() const noexcept { return nodes_.empty(); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t leaf_count() const noexcept { return leaf_of_.size(); }

  bool has_node(NodeId v) const { return nodes_.count(v) > 0; }
  bool has_leaf(const PointId& p) const { return leaf_of_.count(p) > 0; }

  const Node& node(NodeId v) const {
    auto it = nodes_.find(v);
    if (it == nodes_.end()) {
      throw LookupError("forest: unknown node #" + std::to_string(v.value));
    }
    return it->second;
  }

  int height(NodeId v) const { return node(v).height; }

  NodeId leaf(const PointId& p) const {
    auto it = leaf_of_.find(p);
    if (it == leaf_of_.end()) throw LookupError("forest: no leaf for point " + p.value);
    return it->second;
  }

  NodeId root_of(NodeId v) const {
    NodeId cur = v;
    std::size_t steps = 0;
    while (node(cur).parent) {
      cur = *node(cur).parent;
      if (++steps > nodes_.size()) throw StateError("forest: parent chain has a cycle");
    }
    return cur;
  }

  /// Number of edges between a point's leaf and its root.
  int path_length(const PointId& p) const { return height(root_of(leaf(p))); }

  /// The unique ancestor of p's leaf at the given height; height 0 is the
  /// leaf itself. The path must be long enough.
  NodeId ancestor_at_height(const PointId& p, int target_height) const {
    if (target_height < 0) throw ArgumentError("ancestor_at_height: negative height");
    NodeId cur = leaf(p);
    for (int step = 0; step < target_height; ++step) {
      const std::optional<NodeId>& up = node(cur).parent;
      if (!up) {
        throw PreconditionError("ancestor_at_height: path of " + p.value +
                                " is shorter than " + std::to_string(target_height));
      }
      cur = *up;
    }
    if (node(cur).height != target_height) {
      throw StateError("forest: stored height mismatch on the path of " + p.value);
    }
    return cur;
  }

  std::vector<NodeId> roots() const {
    std::vector<NodeId> out;
    for (const auto& [id, n] : nodes_) {
      if (!n.parent) out.push_back(id);
    }
    return out;
  }

  std::vector<NodeId> node_ids() const {
    std::vector<NodeId> out;
    out.reserve(nodes_.size());
    for (const auto& [id, n] : nodes_) out.push_back(id);
    return out;
  }

  /// Active points (leaf labels) in ascending order.
  std::vector<PointId> points() const {
    std::vector<PointId> out;
    out.reserve(leaf_of_.size());
    for (const auto& [p, id] : leaf_of_) out.push_back(p);
    return out;
  }

  /// Points of all leaves in the subtree of v, ascending.
  std::vector<PointId> subtree_points(NodeId v) const {
    std::vector<PointId> out;
    std::vector<NodeId> stack{v};
    while (!stack.empty()) {
      const NodeId cur = stack.back();
      stack.pop_back();
      const Node& n = node(cur);
      if (n.point) out.push_back(*n.point);
      for (NodeId c : n.children) stack.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  PointId min_point_in_subtree(NodeId v) const {
    std::vector<PointId> pts = subtree_points(v);
    if (pts.empty()) {
      throw StateError("forest: subtree of #" + std::to_string(v.value) +
                       " has no leaf");
    }
    return pts.front();
  }

  /// New leaf for p with a fresh chain of `length` nodes above it. Returns the
  /// root of the new tree (the leaf itself when length is 0).
  NodeId add_leaf_with_path(const PointId& p, int length) {
    if (length < 0) throw ArgumentError("add_leaf_with_path: negative length");
    if (has_leaf(p)) {
      throw StateError("add_leaf_with_path: point " + p.value + " already present");
    }
    const NodeId leaf_id = fresh_id();
    Node leaf_node;
    leaf_node.point = p;
    nodes_.emplace(leaf_id, std::move(leaf_node));
    leaf_of_.emplace(p, leaf_id);
    NodeId below = leaf_id;
    for (int h = 1; h <= length; ++h) {
      const NodeId id = fresh_id();
      Node n;
      n.height = h;
      n.children.push_back(below);
      nodes_.emplace(id, std::move(n));
      nodes_.at(below).parent = id;
      below = id;
    }
    return below;
  }

  /// Removes the edge (child, parent); child becomes a root. With the flag
  /// set, a parent left childless is deleted; such a parent must itself be a
  /// root, otherwise the forest would be left inconsistent.
  void detach_edge(NodeId child, NodeId parent, bool delete_parent_if_childless) {
    const Node& c = node(child);
    node(parent);
    if (!c.parent || *c.parent != parent) {
      throw StateError("detach_edge: (#" + std::to_string(child.value) + ", #" +
                       std::to_string(parent.value) + ") is not an edge");
    }
    Node& pn = nodes_.at(parent);
    auto it = std::find(pn.children.begin(), pn.children.end(), child);
    if (it == pn.children.end()) {
      throw StateError("detach_edge: parent/child links out of sync");
    }
    pn.children.erase(it);
    nodes_.at(child).parent.reset();
    if (delete_parent_if_childless && pn.children.empty()) {
      if (pn.parent) {
        throw StateError("detach_edge: childless node #" +
                         std::to_string(parent.value) + " is not a root");
      }
      nodes_.erase(parent);
    }
  }

  /// New common parent over the given roots, which must all have equal height
  /// h; the node is created at height h + 1 with children in the given order.
  NodeId attach_new_parent(const std::vector<NodeId>& root_ids) {
    if (root_ids.empty()) throw ArgumentError("attach_new_parent: no roots given");
    const int h = node(root_ids.front()).height;
    std::set<NodeId> seen;
    for (NodeId r : root_ids) {
      const Node& n = node(r);
      if (n.parent) {
        throw StateError("attach_new_parent: #" + std::to_string(r.value) +
                         " is not a root");
      }
      if (n.height != h) {
        throw StateError("attach_new_parent: roots have unequal heights");
      }
      if (!seen.insert(r).second) {
        throw StateError("attach_new_parent: duplicate root");
      }
    }
    const NodeId id = fresh_id();
    Node n;
    n.height = h + 1;
    n.children = root_ids;
    nodes_.emplace(id, std::move(n));
    for (NodeId r : root_ids) nodes_.at(r).parent = id;
    return id;
  }

  /// Removes a leaf that is its own root.
  void remove_isolated_leaf(const PointId& p) {
    auto it = leaf_of_.find(p);
    if (it == leaf_of_.end()) {
      throw StateError("remove_isolated_leaf: point " + p.value + " not present");
    }
    const Node& n = node(it->second);
    if (n.parent || !n.children.empty()) {
      throw StateError("remove_isolated_leaf: " + p.value + " is not isolated");
    }
    nodes_.erase(it->second);
    leaf_of_.erase(it);
  }

  /// Recomputes what the mutators maintain incrementally: parent/child link
  /// symmetry, acyclicity, the leaf bijection, leaf heights of zero and unit
  /// height steps per edge (which together force all leaves of a tree to be
  /// equidistant from its root).
  ValidationReport validate_structure() const {
    ValidationReport report;
    for (const auto& [id, n] : nodes_) {
      const std::string tag = "node #" + std::to_string(id.value);
      if (n.parent) {
        auto pit = nodes_.find(*n.parent);
        if (pit == nodes_.end()) {
          report.add(tag + ": dangling parent");
        } else {
          const auto& siblings = pit->second.children;
          if (std::find(siblings.begin(), siblings.end(), id) == siblings.end()) {
            report.add(tag + ": parent does not list it as a child");
          }
          if (pit->second.height != n.height + 1) {
            report.add(tag + ": parent height is not height + 1");
          }
        }
      }
      std::set<NodeId> child_set;
      for (NodeId c : n.children) {
        auto cit = nodes_.find(c);
        if (cit == nodes_.end()) {
          report.add(tag + ": dangling child");
          continue;
        }
        if (!cit->second.parent || *cit->second.parent != id) {
          report.add(tag + ": child does not point back");
        }
        if (!child_set.insert(c).second) report.add(tag + ": duplicate child");
      }
      if (n.children.empty()) {
        if (!n.point) {
          report.add(tag + ": childless node carries no point");
        } else {
          auto lit = leaf_of_.find(*n.point);
          if (lit == leaf_of_.end() || lit->second != id) {
            report.add(tag + ": leaf not registered for " + n.point->value);
          }
        }
        if (n.height != 0) report.add(tag + ": leaf height is not 0");
      } else if (n.point) {
        report.add(tag + ": internal node carries a point");
      }
    }
    for (const auto& [p, id] : leaf_of_) {
      auto it = nodes_.find(id);
      if (it == nodes_.end() || !it->second.point || *it->second.point != p) {
        report.add("leaf map entry for " + p.value + " is stale");
      }
    }
    for (const auto& [id, n] : nodes_) {
      NodeId cur = id;
      std::size_t steps = 0;
      while (nodes_.count(cur) > 0 && nodes_.at(cur).parent) {
        cur = *nodes_.at(cur).parent;
        if (++steps > nodes_.size()) {
          report.add("cycle through node #" + std::to_string(id.value));
          break;
        }
      }
    }
    return report;
  }

  /// Deterministic one-line-per-node text dump, in node id order.
  std::string debug_dump() const {
    std::ostringstream os;
    for (const auto& [id, n] : nodes_) {
      os << '#' << id.value << " h=" << n.height << " parent=";
      if (n.parent) {
        os << '#' << n.parent->value;
      } else {
        os << '-';
      }
      os << " point=" << (n.point ? n.point->value : "-") << " children=[";
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i > 0) os << ' ';
        os << '#' << n.children[i].value;
      }
      os << "]\n";
    }
    return os.str();
  }

  friend bool operator==(const LeveledForest&, const LeveledForest&) = default;

 private:
  NodeId fresh_id() { return NodeId{next_id_++}; }

  std::map<NodeId, Node> nodes_;
  std::map<PointId, NodeId> leaf_of_;
  std::uint64_t next_id_ = 1;
};

/// Verifies the five valid-triple conditions: (1) separation of the geometric
/// rank, (2) both ranks bounded by the path length to the root, (3) exactly
/// one smooth holder per node, (4) exactly one geometric holder per edge,
/// (5) leaves of high geometric rank under a common node are close.
inline ValidationReport check_valid_triple(const LeveledForest& f,
                                           const RankFunction& xi_g,
                                           const RankFunction& xi_s,
                                           const MetricUniverse& u) {
  ValidationReport report;
  const ValidationReport structure = f.validate_structure();
  if (!structure.ok()) {
    report.merge(structure, "structure: ");
    return report;
  }
  const std::vector<PointId> pts = f.points();
  if (xi_g.points() != pts || xi_s.points() != pts) {
    report.add("rank function domains differ from the leaf set");
    return report;
  }
  for (const auto& [p, q] : check_separation(xi_g, u)) {
    report.add("condition 1: separation violated by (" + p.value + ", " + q.value + ")");
  }
  for (const PointId& p : pts) {
    const int len = f.path_length(p);
    if (xi_g.at(p) > len) {
      report.add("condition 2: geometric rank of " + p.value +
                 " exceeds its path length " + std::to_string(len));
    }
    if (xi_s.at(p) > len) {
      report.add("condition 2: smooth rank of " + p.value +
                 " exceeds its path length " + std::to_string(len));
    }
  }
  for (const NodeId v : f.node_ids()) {
    const int h = f.height(v);
    const std::vector<PointId> leaves = f.subtree_points(v);
    int smooth_holders = 0;
    for (const PointId& p : leaves) {
      if (xi_s.at(p) >= h) ++smooth_holders;
    }
    if (smooth_holders != 1) {
      report.add("condition 3: node #" + std::to_string(v.value) + " at height " +
                 std::to_string(h) + " has " + std::to_string(smooth_holders) +
                 " smooth holders");
    }
    const auto& parent = f.node(v).parent;
    if (parent) {
      const int hv = f.height(*parent);
      int geometric_holders = 0;
      for (const PointId& p : leaves) {
        if (xi_g.at(p) >= hv) ++geometric_holders;
      }
      if (geometric_holders != 1) {
        report.add("condition 4: edge (#" + std::to_string(v.value) + ", #" +
                   std::to_string(parent->value) + ") has " +
                   std::to_string(geometric_holders) + " geometric holders");
      }
    }
    std::vector<PointId> high;
    for (const PointId& p : leaves) {
      if (xi_g.at(p) >= h) high.push_back(p);
    }
    const double limit = power_of_two(h + 1);
    for (std::size_t i = 0; i < high.size(); ++i) {
      for (std::size_t j = i + 1; j < high.size(); ++j) {
        if (u.distance(high[i], high[j]) >= limit) {
          report.add("condition 5: leaves " + high[i].value + " and " + high[j].value +
                     " under node #" + std::to_string(v.value) +
                     " are at distance >= 2^" + std::to_string(h + 1));
        }
      }
    }
  }
  return report;
}

/// Upper bound on the distance between a leaf of geometric rank >= h and any
/// other leaf under a common ancestor of height h.
inline double subtree_diameter_bound(int height) {
  return 4.0 * power_of_two(height) - 4.0;
}

/// Checks the subtree distance bound on every node. The bound always holds
/// for valid triples, so a violation indicates an implementation bug.
inline ValidationReport subtree_diameter_bound_check(const LeveledForest& f,
                                                     const RankFunction& xi_g,
                                                     const MetricUniverse& u) {
  ValidationReport report;
  const ValidationReport structure = f.validate_structure();
  if (!structure.ok()) {
    report.merge(structure, "structure: ");
    return report;
  }
  for (const NodeId v : f.node_ids()) {
    const int h = f.height(v);
    if (h == 0) continue;
    const std::vector<PointId> leaves = f.subtree_points(v);
    const double bound = subtree_diameter_bound(h);
    for (const PointId& q : leaves) {
      if (xi_g.at(q) < h) continue;
      for (const PointId& p : leaves) {
        if (p == q) continue;
        if (xi_g.at(p) >= h && p < q) continue;  // pair already covered from p
        if (u.distance(q, p) > bound) {
          report.add("subtree bound violated under node #" + std::to_string(v.value) +
                     ": d(" + q.value + ", " + p.value + ") > " +
                     detail::format_distance(bound));
        }
      }
    }
  }
  return report;
}

}  // namespace dynkc

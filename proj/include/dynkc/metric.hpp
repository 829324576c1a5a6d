#pragma once

#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dynkc/errors.hpp"
#include "dynkc/report.hpp"

namespace dynkc {

/// Identifier of a point in a metric universe. Ordered lexicographically on
/// its string form; this fixed total order resolves every tie-break made by
/// the engine, so runs are reproducible.
struct PointId {
  std::string value;

  auto operator<=>(const PointId&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const PointId& id) {
  return os << id.value;
}

/// Exact 2^exponent as a double. All thresholds used by the engine are powers
/// of two, so comparisons against them need no epsilon.
inline double power_of_two(int exponent) { return std::ldexp(1.0, exponent); }

/// Largest rank attainable with diameter bound delta: ceil(log2(delta)) + 1.
inline int rank_cap(std::int64_t delta) {
  if (delta < 1) throw ArgumentError("rank_cap: delta must be at least 1");
  return static_cast<int>(std::bit_width(static_cast<std::uint64_t>(delta - 1))) + 1;
}

/// A finite set of named points with a distance oracle. Either Euclidean
/// (coordinates per point, distances computed on demand) or an explicit
/// distance matrix over the whole universe. Immutable after construction.
class MetricUniverse {
 public:
  static MetricUniverse euclidean(
      int dim, const std::vector<std::pair<PointId, std::vector<double>>>& pts,
      std::int64_t delta) {
    if (dim < 1) throw ArgumentError("euclidean universe: dim must be at least 1");
    if (delta < 1) throw ArgumentError("universe: delta must be at least 1");
    MetricUniverse u;
    u.delta_ = delta;
    u.dim_ = dim;
    std::map<PointId, std::vector<double>> by_id;
    for (const auto& [id, coords] : pts) {
      if (static_cast<int>(coords.size()) != dim) {
        throw ArgumentError("euclidean universe: point " + id.value +
                            " has wrong dimension");
      }
      if (!by_id.emplace(id, coords).second) {
        throw ArgumentError("euclidean universe: duplicate point " + id.value);
      }
    }
    for (auto& [id, coords] : by_id) {
      u.index_of_.emplace(id, u.sorted_points_.size());
      u.sorted_points_.push_back(id);
      u.coords_by_index_.push_back(std::move(coords));
    }
    return u;
  }

  static MetricUniverse from_matrix(const std::vector<PointId>& ids,
                                    const std::vector<std::vector<double>>& matrix,
                                    std::int64_t delta) {
    if (delta < 1) throw ArgumentError("universe: delta must be at least 1");
    if (matrix.size() != ids.size()) {
      throw ArgumentError("matrix universe: matrix size does not match point count");
    }
    MetricUniverse u;
    u.delta_ = delta;
    u.matrix_mode_ = true;
    std::map<PointId, std::size_t> declared;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (matrix[i].size() != ids.size()) {
        throw ArgumentError("matrix universe: matrix is not square");
      }
      if (!declared.emplace(ids[i], i).second) {
        throw ArgumentError("matrix universe: duplicate point " + ids[i].value);
      }
    }
    // Store rows permuted into sorted-id order so indexes are canonical.
    std::vector<std::size_t> original;
    for (const auto& [id, idx] : declared) {
      u.index_of_.emplace(id, u.sorted_points_.size());
      u.sorted_points_.push_back(id);
      original.push_back(idx);
    }
    u.matrix_.resize(ids.size(), std::vector<double>(ids.size()));
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = 0; j < ids.size(); ++j) {
        u.matrix_[i][j] = matrix[original[i]][original[j]];
      }
    }
    return u;
  }

  bool is_matrix() const noexcept { return matrix_mode_; }
  std::int64_t delta() const noexcept { return delta_; }
  int rank_cap() const { return dynkc::rank_cap(delta_); }
  std::size_t size() const noexcept { return sorted_points_.size(); }

  bool contains(const PointId& p) const { return index_of_.count(p) > 0; }

  /// Points of the universe in ascending PointId order.
  const std::vector<PointId>& points() const noexcept { return sorted_points_; }

  int dim() const {
    if (matrix_mode_) throw StateError("dim: universe is in matrix mode");
    return dim_;
  }

  /// Position of p within points(); the index form of the distance oracle is
  /// the hot-path interface.
  std::size_t index_of(const PointId& p) const {
    auto it = index_of_.find(p);
    if (it == index_of_.end()) throw LookupError("unknown point " + p.value);
    return it->second;
  }

  const std::vector<double>& coords(const PointId& p) const {
    if (matrix_mode_) throw StateError("coords: universe is in matrix mode");
    return coords_by_index_[index_of(p)];
  }

  double distance_by_index(std::size_t i, std::size_t j) const {
    if (matrix_mode_) return matrix_[i][j];
    const std::vector<double>& a = coords_by_index_[i];
    const std::vector<double>& b = coords_by_index_[j];
    double sum = 0.0;
    for (std::size_t axis = 0; axis < a.size(); ++axis) {
      const double diff = a[axis] - b[axis];
      sum += diff * diff;
    }
    return std::sqrt(sum);
  }

  double distance(const PointId& p, const PointId& q) const {
    return distance_by_index(index_of(p), index_of(q));
  }

  friend bool operator==(const MetricUniverse&, const MetricUniverse&) = default;

 private:
  MetricUniverse() = default;

  std::int64_t delta_ = 1;
  bool matrix_mode_ = false;
  int dim_ = 0;
  std::map<PointId, std::size_t> index_of_;
  std::vector<std::vector<double>> coords_by_index_;
  std::vector<std::vector<double>> matrix_;
  std::vector<PointId> sorted_points_;
};

namespace detail {

inline std::string format_distance(double d) {
  std::ostringstream os;
  os << d;
  return os.str();
}

}  // namespace detail

/// Checks the metric axioms and the [1, delta] bound over the active points.
/// Symmetry and the triangle inequality are checked exhaustively in matrix
/// mode; Euclidean geometry satisfies them analytically. Violations go into
/// the report, never into exceptions.
inline ValidationReport validate_universe(const MetricUniverse& u,
                                          const std::set<PointId>& active) {
  for (const PointId& p : active) {
    if (!u.contains(p)) throw LookupError("validate_universe: unknown point " + p.value);
  }
  ValidationReport report;
  if (u.is_matrix()) {
    const std::vector<PointId>& pts = u.points();
    for (const PointId& p : pts) {
      if (u.distance(p, p) != 0.0) {
        report.add("nonzero self-distance at " + p.value);
      }
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        if (u.distance(pts[i], pts[j]) != u.distance(pts[j], pts[i])) {
          report.add("asymmetry between " + pts[i].value + " and " + pts[j].value);
        }
      }
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        for (std::size_t m = 0; m < pts.size(); ++m) {
          if (m == i || m == j) continue;
          const double direct = u.distance(pts[i], pts[j]);
          const double via = u.distance(pts[i], pts[m]) + u.distance(pts[m], pts[j]);
          if (direct > via) {
            report.add("triangle inequality violated: d(" + pts[i].value + "," +
                       pts[j].value + ") = " + detail::format_distance(direct) +
                       " > " + detail::format_distance(via) + " via " + pts[m].value);
          }
        }
      }
    }
  }
  const double delta = static_cast<double>(u.delta());
  for (auto it = active.begin(); it != active.end(); ++it) {
    for (auto jt = std::next(it); jt != active.end(); ++jt) {
      const double d = u.distance(*it, *jt);
      if (d < 1.0) {
        report.add("distance " + detail::format_distance(d) + " < 1 between " +
                   it->value + " and " + jt->value);
      } else if (d > delta) {
        report.add("distance " + detail::format_distance(d) + " > delta between " +
                   it->value + " and " + jt->value);
      }
    }
  }
  return report;
}

}  // namespace dynkc

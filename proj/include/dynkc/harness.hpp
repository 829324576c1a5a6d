#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dynkc/clusterer.hpp"
#include "dynkc/core_ops.hpp"
#include "dynkc/errors.hpp"
#include "dynkc/leveled_forest.hpp"
#include "dynkc/metric.hpp"
#include "dynkc/oracle.hpp"
#include "dynkc/ranks.hpp"
#include "dynkc/stream.hpp"

namespace dynkc {

enum class OracleMode { None, Exact, Gonzalez };

struct RunOptions {
  bool verify = false;
  OracleMode oracle = OracleMode::None;
  int audit_every = 1;
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
};

/// Per-step audit verdicts. The oracle-backed checks are present only when an
/// oracle value was computed for the step and |P| > k.
struct StepAudit {
  bool structure_ok = true;
  bool valid_triple_ok = true;
  bool separation_ok = true;
  bool maximality_ok = true;
  bool valid_tuple_ok = true;
  bool cap_witness_ok = true;
  bool smooth_churn_ok = true;
  bool diameter_bound_ok = true;
  std::optional<bool> ratio_ok;
  std::optional<bool> lower_bound_ok;
  std::vector<std::string> violations;

  bool ok() const {
    return structure_ok && valid_triple_ok && separation_ok && maximality_ok &&
           valid_tuple_ok && cap_witness_ok && smooth_churn_ok &&
           diameter_bound_ok && ratio_ok.value_or(true) &&
           lower_bound_ok.value_or(true);
  }
};

struct StepReport {
  std::uint64_t step = 0;
  StreamEventKind kind = StreamEventKind::Insert;
  PointId id;
  std::vector<PointId> centers;
  int swaps = 0;
  int symm_diff = 0;
  double cost = 0.0;
  std::optional<std::string> oracle_method;
  std::optional<double> oracle_value;
  std::optional<double> ratio;
  std::optional<StepAudit> audit;
};

/// Runs the full audit bundle on the clusterer's current state: structural
/// invariants, the valid-triple conditions, separation, maximality, the valid
/// tuple, the cap witness, per-level smooth churn of this step's delta, the
/// subtree distance bound, and (given an oracle value) the approximation and
/// separation lower bounds.
inline StepAudit audit_step(const Clusterer& clusterer, const SmoothRankDelta& delta,
                            UpdateKind kind, double step_cost,
                            const std::optional<OracleResult>& oracle) {
  StepAudit audit;
  const TripleState& triple = clusterer.triple();
  const MetricUniverse& universe = clusterer.universe();

  const ValidationReport structure = triple.forest.validate_structure();
  audit.structure_ok = structure.ok();
  for (const auto& v : structure.violations) audit.violations.push_back("structure: " + v);

  const ValidationReport triple_report =
      check_valid_triple(triple.forest, triple.xi_g, triple.xi_s, universe);
  audit.valid_triple_ok = triple_report.ok();
  for (const auto& v : triple_report.violations) {
    audit.violations.push_back("valid triple: " + v);
  }

  const auto separation = check_separation(triple.xi_g, universe);
  audit.separation_ok = separation.empty();
  for (const auto& [a, b] : separation) {
    audit.violations.push_back("separation: (" + a.value + ", " + b.value + ")");
  }

  const auto maximality = check_maximality(triple.xi_g, universe);
  audit.maximality_ok = maximality.empty();
  for (const PointId& p : maximality) {
    audit.violations.push_back("maximality: " + p.value);
  }

  const ValidationReport tuple_report =
      check_valid_tuple(triple.xi_g, triple.xi_s, universe);
  audit.valid_tuple_ok = tuple_report.ok();
  for (const auto& v : tuple_report.violations) {
    audit.violations.push_back("valid tuple: " + v);
  }

  const int cap = universe.rank_cap();
  if (!triple.empty()) {
    bool witness = false;
    for (const auto& [p, r] : triple.xi_g.entries()) {
      if (r >= cap) {
        witness = true;
        break;
      }
    }
    audit.cap_witness_ok = witness;
    if (!witness) {
      audit.violations.push_back("cap witness: no point of rank " + std::to_string(cap));
    }
  }

  if (kind == UpdateKind::Insert) {
    audit.smooth_churn_ok = delta.preexisting_unchanged();
    if (!audit.smooth_churn_ok) {
      audit.violations.push_back("smooth churn: insertion changed pre-existing ranks");
    }
  } else {
    for (int h = 1; h <= cap; ++h) {
      const int drops = delta.drops_across(h);
      const int raises = delta.raises_across(h);
      if (drops > 1 || raises > 2) {
        audit.smooth_churn_ok = false;
        audit.violations.push_back("smooth churn: level " + std::to_string(h) + " saw " +
                                   std::to_string(drops) + " drops and " +
                                   std::to_string(raises) + " raises");
      }
    }
  }

  const ValidationReport diameter =
      subtree_diameter_bound_check(triple.forest, triple.xi_g, universe);
  audit.diameter_bound_ok = diameter.ok();
  for (const auto& v : diameter.violations) {
    audit.violations.push_back("diameter: " + v);
  }

  const int active = static_cast<int>(triple.forest.leaf_count());
  if (oracle && active > clusterer.k()) {
    audit.ratio_ok = step_cost <= 24.0 * oracle->value;
    if (!*audit.ratio_ok) {
      audit.violations.push_back("approximation: cost " +
                                 detail::format_distance(step_cost) + " exceeds 24 * " +
                                 detail::format_distance(oracle->value));
    }
    const double lb = opt_lower_bound(triple.xi_g, clusterer.k());
    audit.lower_bound_ok = lb <= oracle->value;
    if (!*audit.lower_bound_ok) {
      audit.violations.push_back("lower bound: " + detail::format_distance(lb) +
                                 " exceeds the oracle value " +
                                 detail::format_distance(oracle->value));
    }
  }
  return audit;
}

inline nlohmann::ordered_json to_json(const StepReport& report) {
  nlohmann::ordered_json j;
  j["step"] = report.step;
  nlohmann::ordered_json event;
  event["type"] = report.kind == StreamEventKind::Insert ? "insert" : "delete";
  event["id"] = report.id.value;
  j["event"] = std::move(event);
  nlohmann::ordered_json centers = nlohmann::ordered_json::array();
  for (const PointId& c : report.centers) centers.push_back(c.value);
  j["centers"] = std::move(centers);
  j["swaps"] = report.swaps;
  j["symm_diff"] = report.symm_diff;
  j["cost"] = report.cost;
  if (report.oracle_method) {
    nlohmann::ordered_json oracle;
    oracle["method"] = *report.oracle_method;
    oracle["value"] = *report.oracle_value;
    if (report.ratio) oracle["ratio"] = *report.ratio;
    j["oracle"] = std::move(oracle);
  }
  if (report.audit) {
    const StepAudit& a = *report.audit;
    nlohmann::ordered_json audit;
    audit["ok"] = a.ok();
    audit["structure"] = a.structure_ok;
    audit["valid_triple"] = a.valid_triple_ok;
    audit["separation"] = a.separation_ok;
    audit["maximality"] = a.maximality_ok;
    audit["valid_tuple"] = a.valid_tuple_ok;
    audit["cap_witness"] = a.cap_witness_ok;
    audit["smooth_churn"] = a.smooth_churn_ok;
    audit["diameter_bound"] = a.diameter_bound_ok;
    if (a.ratio_ok) audit["ratio"] = *a.ratio_ok;
    if (a.lower_bound_ok) audit["lower_bound"] = *a.lower_bound_ok;
    if (!a.violations.empty()) audit["violations"] = a.violations;
    j["audit"] = std::move(audit);
  }
  return j;
}

/// Replays a stream through the clusterer, writing one StepReport per event as
/// JSON Lines. Exit status: 0 success, 2 parse error, 3 precondition
/// violation, 4 guarantee violation found by --verify.
inline int run_stream(std::istream& in, std::ostream& out, std::ostream& err,
                      const RunOptions& options) {
  if (options.audit_every < 1) {
    err << "audit-every must be at least 1\n";
    return 3;
  }
  Stream stream;
  try {
    stream = parse_stream(in);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return 2;
  }
  std::optional<Clusterer> clusterer;
  try {
    clusterer.emplace(build_universe(stream), stream.header.k);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    const StreamEvent& event = stream.events[i];
    const std::uint64_t step = i + 1;
    UpdateEvent update;
    update.kind = event.kind == StreamEventKind::Insert ? UpdateKind::Insert
                                                        : UpdateKind::Delete;
    update.point = event.id;
    Clusterer::ApplyResult result;
    try {
      result = clusterer->apply(update);
    } catch (const Error& e) {
      err << "step " << step << " (line " << stream.event_lines[i]
          << "): " << e.what() << '\n';
      return 3;
    }
    StepReport report;
    report.step = step;
    report.kind = event.kind;
    report.id = event.id;
    report.centers = clusterer->centers();
    report.swaps = result.diff.swaps();
    report.symm_diff = result.diff.symmetric_difference();
    report.cost = clusterer->current_cost();
    std::optional<OracleResult> oracle;
    if (options.oracle != OracleMode::None && !clusterer->active_points().empty()) {
      const std::vector<PointId> active = clusterer->active_points();
      if (options.oracle == OracleMode::Exact) {
        try {
          oracle = brute_force_opt(active, clusterer->k(), clusterer->universe(),
                                   options.enumeration_cap);
        } catch (const ResourceError&) {
          // Too large to enumerate; fall back to the certified 2-approximation.
          oracle = gonzalez(active, clusterer->k(), clusterer->universe());
        }
      } else {
        oracle = gonzalez(active, clusterer->k(), clusterer->universe());
      }
      report.oracle_method =
          oracle->method == OracleResult::Method::Exact ? "exact" : "gonzalez";
      report.oracle_value = oracle->value;
      if (oracle->value > 0.0) report.ratio = report.cost / oracle->value;
    }
    if (options.verify && step % static_cast<std::uint64_t>(options.audit_every) == 0) {
      report.audit = audit_step(*clusterer, result.smooth_delta, update.kind,
                                report.cost, oracle);
    }
    out << to_json(report).dump() << '\n';
    if (report.audit && !report.audit->ok()) {
      err << "step " << step << ": guarantee violation\n";
      for (const std::string& v : report.audit->violations) {
        err << "  " << v << '\n';
      }
      return 4;
    }
  }
  return 0;
}

enum class GenMode { InsertOnly, SlidingWindow, AdversarialCycle, Random };

inline std::optional<GenMode> gen_mode_from_string(const std::string& s) {
  if (s == "insert-only") return GenMode::InsertOnly;
  if (s == "sliding-window") return GenMode::SlidingWindow;
  if (s == "adversarial-cycle") return GenMode::AdversarialCycle;
  if (s == "random") return GenMode::Random;
  return std::nullopt;
}

inline std::string to_string(GenMode mode) {
  switch (mode) {
    case GenMode::InsertOnly: return "insert-only";
    case GenMode::SlidingWindow: return "sliding-window";
    case GenMode::AdversarialCycle: return "adversarial-cycle";
    case GenMode::Random: return "random";
  }
  return "random";
}

struct GenOptions {
  std::uint64_t n = 10;
  int k = 1;
  std::int64_t delta = 8;
  GenMode mode = GenMode::Random;
  std::uint64_t seed = 0;
  /// Bound on simultaneously active points in random mode; 0 picks
  /// min(n, 200).
  std::uint64_t max_active = 0;
};

namespace detail {

/// Axis-aligned integer grid: spacing 1 gives minimum pairwise distance 1,
/// and extent * sqrt(dim) <= delta keeps every pair within the diameter
/// bound regardless of which subset is active.
struct GridSpec {
  int dim = 1;
  std::int64_t extent = 1;  // coordinates run over 0..extent per axis
  std::uint64_t capacity = 0;
};

inline GridSpec choose_grid(std::int64_t delta, std::uint64_t min_capacity) {
  for (int dim = 1; dim <= 8; ++dim) {
    // largest extent with extent^2 * dim <= delta^2
    std::int64_t extent = 0;
    while ((extent + 1) * (extent + 1) * static_cast<std::int64_t>(dim) <=
           delta * delta) {
      ++extent;
    }
    if (extent < 1) break;
    std::uint64_t capacity = 1;
    bool overflow = false;
    for (int i = 0; i < dim; ++i) {
      const std::uint64_t side = static_cast<std::uint64_t>(extent) + 1;
      if (capacity > (std::uint64_t{1} << 62) / side) {
        overflow = true;
        break;
      }
      capacity *= side;
    }
    if (overflow || capacity >= min_capacity) {
      return {dim, extent, overflow ? (std::uint64_t{1} << 62) : capacity};
    }
  }
  throw GenerationError("cannot place " + std::to_string(min_capacity) +
                        " points with minimum distance 1 and diameter at most " +
                        std::to_string(delta));
}

inline std::vector<double> grid_coords(std::uint64_t index, const GridSpec& grid) {
  std::vector<double> out(static_cast<std::size_t>(grid.dim));
  const std::uint64_t side = static_cast<std::uint64_t>(grid.extent) + 1;
  for (int axis = 0; axis < grid.dim; ++axis) {
    out[static_cast<std::size_t>(axis)] = static_cast<double>(index % side);
    index /= side;
  }
  return out;
}

/// Bounded draw with plain modulo reduction; deterministic across platforms,
/// unlike uniform_int_distribution.
inline std::uint64_t next_below(std::mt19937_64& rng, std::uint64_t bound) {
  return rng() % bound;
}

inline std::vector<std::uint64_t> sample_indices(std::mt19937_64& rng,
                                                 const GridSpec& grid,
                                                 std::uint64_t count) {
  std::vector<std::uint64_t> out;
  if (count == 0) return out;
  if (grid.capacity < count) {
    throw GenerationError("grid capacity too small");
  }
  if (grid.capacity <= 4 * count) {
    std::vector<std::uint64_t> all(grid.capacity);
    std::iota(all.begin(), all.end(), std::uint64_t{0});
    for (std::uint64_t i = grid.capacity; i > 1; --i) {
      std::swap(all[i - 1], all[next_below(rng, i)]);
    }
    out.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count));
  } else {
    std::set<std::uint64_t> seen;
    while (out.size() < count) {
      const std::uint64_t idx = next_below(rng, grid.capacity);
      if (seen.insert(idx).second) out.push_back(idx);
    }
  }
  return out;
}

inline std::string padded_label(std::uint64_t index, std::uint64_t total) {
  std::size_t width = 1;
  for (std::uint64_t v = total; v >= 10; v /= 10) ++width;
  std::string digits = std::to_string(index);
  return "p" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

}  // namespace detail

/// Produces a valid stream whose points sit on an integer grid, so every pair
/// of simultaneously active points is within [1, delta] by construction.
/// Deterministic for a given seed.
inline Stream generate_stream(const GenOptions& options) {
  if (options.n < 1) throw GenerationError("n must be at least 1");
  if (options.k < 1) throw GenerationError("k must be at least 1");
  if (options.delta < 1) throw GenerationError("delta must be at least 1");
  std::mt19937_64 rng(options.seed);

  std::uint64_t universe_size = 0;
  switch (options.mode) {
    case GenMode::InsertOnly:
      universe_size = options.n;
      break;
    case GenMode::SlidingWindow: {
      const std::uint64_t window = std::max<std::uint64_t>(1, options.n / 4);
      universe_size = window >= options.n
                          ? options.n
                          : window + (options.n - window + 1) / 2;
      break;
    }
    case GenMode::AdversarialCycle: {
      const std::uint64_t base =
          std::min<std::uint64_t>(options.n, static_cast<std::uint64_t>(options.k) + 2);
      universe_size = base + (options.n > base ? 1 : 0);
      break;
    }
    case GenMode::Random: {
      const std::uint64_t cap =
          options.max_active > 0 ? options.max_active : std::min<std::uint64_t>(options.n, 200);
      universe_size = std::max<std::uint64_t>(2, cap);
      break;
    }
  }

  const detail::GridSpec grid = detail::choose_grid(options.delta, universe_size);
  std::vector<std::uint64_t> indices;
  if (options.mode == GenMode::AdversarialCycle) {
    // Base points hug the origin corner; the toggled point sits at the far
    // corner of the grid, as far from the base cluster as the diameter allows.
    for (std::uint64_t i = 0; i + 1 < universe_size; ++i) indices.push_back(i);
    indices.push_back(grid.capacity - 1);
    if (universe_size == 1) indices = {0};
  } else {
    indices = detail::sample_indices(rng, grid, universe_size);
  }

  std::vector<PointId> ids;
  std::vector<std::vector<double>> coords;
  ids.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    ids.push_back(PointId{detail::padded_label(i + 1, universe_size)});
    coords.push_back(detail::grid_coords(indices[i], grid));
  }

  Stream stream;
  stream.header.k = options.k;
  stream.header.delta = options.delta;
  stream.header.metric = StreamMetric::Euclidean;
  stream.header.dim = grid.dim;

  auto push_insert = [&](std::size_t idx) {
    stream.events.push_back({StreamEventKind::Insert, ids[idx], coords[idx]});
  };
  auto push_delete = [&](std::size_t idx) {
    stream.events.push_back({StreamEventKind::Delete, ids[idx], std::nullopt});
  };

  switch (options.mode) {
    case GenMode::InsertOnly: {
      for (std::uint64_t i = 0; i < options.n; ++i) {
        push_insert(static_cast<std::size_t>(i));
      }
      break;
    }
    case GenMode::SlidingWindow: {
      const std::uint64_t window = std::max<std::uint64_t>(1, options.n / 4);
      std::size_t next_point = 0;
      std::vector<std::size_t> active;
      std::uint64_t emitted = 0;
      while (emitted < options.n && next_point < ids.size() &&
             active.size() < window) {
        push_insert(next_point);
        active.push_back(next_point);
        ++next_point;
        ++emitted;
      }
      bool remove_next = true;
      while (emitted < options.n) {
        if (remove_next && !active.empty()) {
          push_delete(active.front());
          active.erase(active.begin());
        } else if (next_point < ids.size()) {
          push_insert(next_point);
          active.push_back(next_point);
          ++next_point;
        } else {
          push_delete(active.front());
          active.erase(active.begin());
        }
        remove_next = !remove_next;
        ++emitted;
      }
      break;
    }
    case GenMode::AdversarialCycle: {
      const std::uint64_t base =
          std::min<std::uint64_t>(options.n, static_cast<std::uint64_t>(options.k) + 2);
      for (std::uint64_t i = 0; i < base; ++i) {
        push_insert(static_cast<std::size_t>(i));
      }
      bool present = false;
      const std::size_t toggled = ids.size() - 1;
      for (std::uint64_t step = base; step < options.n; ++step) {
        if (present) {
          push_delete(toggled);
        } else {
          push_insert(toggled);
        }
        present = !present;
      }
      break;
    }
    case GenMode::Random: {
      std::vector<bool> present(ids.size(), false);
      std::uint64_t active = 0;
      for (std::uint64_t step = 0; step < options.n; ++step) {
        const bool insert =
            active == 0 ||
            (active < ids.size() && detail::next_below(rng, 2) == 0);
        if (insert) {
          std::size_t idx;
          do {
            idx = static_cast<std::size_t>(detail::next_below(rng, ids.size()));
          } while (present[idx]);
          present[idx] = true;
          ++active;
          push_insert(idx);
        } else {
          std::size_t idx;
          do {
            idx = static_cast<std::size_t>(detail::next_below(rng, ids.size()));
          } while (!present[idx]);
          present[idx] = false;
          --active;
          push_delete(idx);
        }
      }
      break;
    }
  }
  stream.event_lines.resize(stream.events.size());
  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    stream.event_lines[i] = i + 2;  // header occupies line 1
  }
  return stream;
}

}  // namespace dynkc

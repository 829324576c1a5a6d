#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dynkc/errors.hpp"
#include "dynkc/metric.hpp"

namespace dynkc {

enum class StreamMetric { Euclidean, Matrix };
enum class StreamEventKind { Insert, Delete };

/// First line of a stream file. Matrix mode declares the whole universe up
/// front; Euclidean mode declares only the dimension and lets insert events
/// carry coordinates.
struct StreamHeader {
  int k = 1;
  std::int64_t delta = 1;
  StreamMetric metric = StreamMetric::Euclidean;
  int dim = 0;
  std::vector<PointId> points;
  std::vector<std::vector<double>> matrix;

  friend bool operator==(const StreamHeader&, const StreamHeader&) = default;
};

struct StreamEvent {
  StreamEventKind kind = StreamEventKind::Insert;
  PointId id;
  std::optional<std::vector<double>> coords;

  friend bool operator==(const StreamEvent&, const StreamEvent&) = default;
};

struct Stream {
  StreamHeader header;
  std::vector<StreamEvent> events;
  // 1-based source line of each event; informational, ignored by comparison.
  std::vector<std::size_t> event_lines;

  friend bool operator==(const Stream& a, const Stream& b) {
    return a.header == b.header && a.events == b.events;
  }
};

namespace detail {

inline bool blank(const std::string& line) {
  for (char c : line) {
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

inline const nlohmann::json& field(const nlohmann::json& j, const char* key,
                                   std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError(line, std::string("missing field \"") + key + "\"");
  }
  return *it;
}

inline std::int64_t int_field(const nlohmann::json& j, const char* key,
                              std::size_t line) {
  const nlohmann::json& v = field(j, key, line);
  if (!v.is_number_integer()) {
    throw ParseError(line, std::string("field \"") + key + "\" must be an integer");
  }
  return v.get<std::int64_t>();
}

inline std::string string_field(const nlohmann::json& j, const char* key,
                                std::size_t line) {
  const nlohmann::json& v = field(j, key, line);
  if (!v.is_string()) {
    throw ParseError(line, std::string("field \"") + key + "\" must be a string");
  }
  return v.get<std::string>();
}

inline std::vector<double> number_array(const nlohmann::json& v, const char* key,
                                        std::size_t line) {
  if (!v.is_array()) {
    throw ParseError(line, std::string("field \"") + key + "\" must be an array");
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& entry : v) {
    if (!entry.is_number()) {
      throw ParseError(line, std::string("field \"") + key + "\" must hold numbers");
    }
    out.push_back(entry.get<double>());
  }
  return out;
}

}  // namespace detail

/// Parses a JSON Lines stream: exactly one header on the first non-blank line,
/// then insert/delete events. Structural problems raise ParseError with the
/// offending line number; replay-order problems (deleting an absent point) are
/// left to the replay itself.
inline Stream parse_stream(std::istream& in) {
  Stream stream;
  bool have_header = false;
  std::string line;
  std::size_t line_no = 0;
  std::map<PointId, std::vector<double>> seen_coords;
  std::set<PointId> declared;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::blank(line)) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError(line_no, "each line must be a JSON object");
    const std::string type = detail::string_field(j, "type", line_no);
    if (type == "header") {
      if (have_header) throw ParseError(line_no, "duplicate header");
      StreamHeader& h = stream.header;
      const std::int64_t k = detail::int_field(j, "k", line_no);
      if (k < 1) throw ParseError(line_no, "k must be at least 1");
      h.k = static_cast<int>(k);
      h.delta = detail::int_field(j, "delta", line_no);
      if (h.delta < 1) throw ParseError(line_no, "delta must be at least 1");
      const std::string metric = detail::string_field(j, "metric", line_no);
      if (metric == "euclidean") {
        h.metric = StreamMetric::Euclidean;
        const std::int64_t dim = detail::int_field(j, "dim", line_no);
        if (dim < 1) throw ParseError(line_no, "dim must be at least 1");
        h.dim = static_cast<int>(dim);
      } else if (metric == "matrix") {
        h.metric = StreamMetric::Matrix;
        const nlohmann::json& pts = detail::field(j, "points", line_no);
        if (!pts.is_array()) throw ParseError(line_no, "points must be an array");
        for (const auto& entry : pts) {
          if (!entry.is_string()) {
            throw ParseError(line_no, "points must hold strings");
          }
          PointId id{entry.get<std::string>()};
          if (!declared.insert(id).second) {
            throw ParseError(line_no, "duplicate point " + id.value);
          }
          h.points.push_back(std::move(id));
        }
        const nlohmann::json& m = detail::field(j, "matrix", line_no);
        if (!m.is_array() || m.size() != h.points.size()) {
          throw ParseError(line_no, "matrix must have one row per point");
        }
        for (const auto& row : m) {
          std::vector<double> r = detail::number_array(row, "matrix", line_no);
          if (r.size() != h.points.size()) {
            throw ParseError(line_no, "matrix is not square");
          }
          h.matrix.push_back(std::move(r));
        }
      } else {
        throw ParseError(line_no, "metric must be \"euclidean\" or \"matrix\"");
      }
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError(line_no, "first line must be a header");
    StreamEvent event;
    if (type == "insert") {
      event.kind = StreamEventKind::Insert;
    } else if (type == "delete") {
      event.kind = StreamEventKind::Delete;
    } else {
      throw ParseError(line_no, "unknown event type \"" + type + "\"");
    }
    event.id = PointId{detail::string_field(j, "id", line_no)};
    if (stream.header.metric == StreamMetric::Euclidean) {
      if (event.kind == StreamEventKind::Insert) {
        std::vector<double> coords =
            detail::number_array(detail::field(j, "coords", line_no), "coords", line_no);
        if (static_cast<int>(coords.size()) != stream.header.dim) {
          throw ParseError(line_no, "coords of " + event.id.value +
                                        " do not match the declared dimension");
        }
        auto [it, inserted] = seen_coords.emplace(event.id, coords);
        if (!inserted && it->second != coords) {
          throw ParseError(line_no, "point " + event.id.value +
                                        " re-inserted with different coordinates");
        }
        event.coords = std::move(coords);
      } else if (j.contains("coords")) {
        throw ParseError(line_no, "delete events carry no coords");
      }
    } else {
      if (j.contains("coords")) {
        throw ParseError(line_no, "matrix-mode events carry no coords");
      }
      if (declared.count(event.id) == 0) {
        throw ParseError(line_no, "point " + event.id.value +
                                      " is not part of the declared universe");
      }
    }
    stream.events.push_back(std::move(event));
    stream.event_lines.push_back(line_no);
  }
  if (!have_header) throw ParseError(line_no == 0 ? 1 : line_no, "missing header");
  return stream;
}

inline Stream parse_stream(const std::string& text) {
  std::istringstream in(text);
  return parse_stream(in);
}

inline void serialize_stream(const Stream& stream, std::ostream& out) {
  nlohmann::ordered_json header;
  header["type"] = "header";
  header["k"] = stream.header.k;
  header["delta"] = stream.header.delta;
  if (stream.header.metric == StreamMetric::Euclidean) {
    header["metric"] = "euclidean";
    header["dim"] = stream.header.dim;
  } else {
    header["metric"] = "matrix";
    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
    for (const PointId& p : stream.header.points) pts.push_back(p.value);
    header["points"] = std::move(pts);
    header["matrix"] = stream.header.matrix;
  }
  out << header.dump() << '\n';
  for (const StreamEvent& event : stream.events) {
    nlohmann::ordered_json j;
    j["type"] = event.kind == StreamEventKind::Insert ? "insert" : "delete";
    j["id"] = event.id.value;
    if (event.coords) j["coords"] = *event.coords;
    out << j.dump() << '\n';
  }
}

inline std::string serialize_stream(const Stream& stream) {
  std::ostringstream out;
  serialize_stream(stream, out);
  return out.str();
}

/// The finite universe a stream declares: the matrix points in matrix mode,
/// every point that ever appears in an insert event in Euclidean mode.
inline MetricUniverse build_universe(const Stream& stream) {
  if (stream.header.metric == StreamMetric::Matrix) {
    return MetricUniverse::from_matrix(stream.header.points, stream.header.matrix,
                                       stream.header.delta);
  }
  std::map<PointId, std::vector<double>> coords;
  for (const StreamEvent& event : stream.events) {
    if (event.kind == StreamEventKind::Insert && event.coords) {
      coords.emplace(event.id, *event.coords);
    }
  }
  std::vector<std::pair<PointId, std::vector<double>>> pts(coords.begin(),
                                                           coords.end());
  return MetricUniverse::euclidean(stream.header.dim, pts, stream.header.delta);
}

}  // namespace dynkc

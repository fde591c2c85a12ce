#ifndef PEDACCESS_OSM_ELEMENTS_HPP
#define PEDACCESS_OSM_ELEMENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pedaccess/geometry/point.hpp"

namespace pedaccess::osm {

using Tags = std::vector<std::pair<std::string, std::string>>;

inline std::optional<std::string_view> tag(const Tags& tags, std::string_view key) {
  for (const auto& [k, v] : tags)
    if (k == key) return std::string_view(v);
  return std::nullopt;
}

/// Fixed-point coordinate in 1e-7 degree units, as stored by OSM itself.
struct Location {
  std::int32_t lat7 = 0;
  std::int32_t lon7 = 0;

  friend bool operator==(const Location&, const Location&) = default;
  friend auto operator<=>(const Location&, const Location&) = default;

  LatLon latlon() const { return {lat7 * 1e-7, lon7 * 1e-7}; }
  static Location from_degrees(double lat, double lon) {
    return {static_cast<std::int32_t>(std::llround(lat * 1e7)), static_cast<std::int32_t>(std::llround(lon * 1e7))};
  }
};

enum class ElementKind : std::uint8_t { node = 0, way = 1, relation = 2 };

inline char kind_letter(ElementKind k) {
  switch (k) {
    case ElementKind::node: return 'n';
    case ElementKind::way: return 'w';
    case ElementKind::relation: return 'r';
  }
  return '?';
}

struct Node {
  std::int64_t id = 0;
  Location location;
  Tags tags;
};

struct Way {
  std::int64_t id = 0;
  std::vector<std::int64_t> refs;
  Tags tags;

  bool closed() const { return refs.size() >= 4 && refs.front() == refs.back(); }
};

struct Member {
  ElementKind kind = ElementKind::node;
  std::int64_t ref = 0;
  std::string role;
};

struct Relation {
  std::int64_t id = 0;
  std::vector<Member> members;
  Tags tags;
};

struct Diagnostics {
  std::size_t nodes = 0;
  std::size_t ways = 0;
  std::size_t relations = 0;
  std::size_t ways_missing_nodes = 0;
};

/// Parsed extract. Every node's location is retained; tags only for tagged nodes.
struct Data {
  std::unordered_map<std::int64_t, Location> locations;
  std::vector<Node> tagged_nodes;
  std::vector<Way> ways;  // only ways whose node references all resolved
  std::vector<Relation> relations;
  Diagnostics diagnostics;

  std::optional<Location> location(std::int64_t node_id) const {
    auto it = locations.find(node_id);
    if (it == locations.end()) return std::nullopt;
    return it->second;
  }

  const Way* find_way(std::int64_t id) const {
    auto it = std::lower_bound(ways.begin(), ways.end(), id, [](const Way& w, std::int64_t v) { return w.id < v; });
    return (it != ways.end() && it->id == id) ? &*it : nullptr;
  }
};

}  // namespace pedaccess::osm

#endif  // PEDACCESS_OSM_ELEMENTS_HPP

#ifndef PEDACCESS_OSM_POIS_HPP
#define PEDACCESS_OSM_POIS_HPP

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pedaccess/geometry/boundary.hpp"
#include "pedaccess/geometry/polygon.hpp"
#include "pedaccess/geometry/projection.hpp"
#include "pedaccess/osm/elements.hpp"

namespace pedaccess {

/// One key-value condition; value "*" matches any value of the key.
struct TagQuery {
  std::string key;
  std::string value;

  friend bool operator==(const TagQuery&, const TagQuery&) = default;
};

/// Destination class name → alternatives (a feature matches if any query matches).
using DestinationQueries = std::map<std::string, std::vector<TagQuery>>;

inline bool matches(const osm::Tags& tags, const TagQuery& q) {
  const auto v = osm::tag(tags, q.key);
  return v && (q.value == "*" || *v == q.value);
}

inline bool matches_any(const osm::Tags& tags, const std::vector<TagQuery>& qs) {
  return std::any_of(qs.begin(), qs.end(), [&](const TagQuery& q) { return matches(tags, q); });
}

struct Poi {
  std::string source_id;  // "n123", "w45", "r6", or "gtfs:<stop_id>"
  Point location;
  osm::Tags tags;
};

struct PoiSet {
  std::string destination_class;
  std::vector<Poi> points;
};

struct PoiStats {
  std::size_t relations_unassembled = 0;
};

namespace detail {

inline std::vector<Point> way_points(const osm::Data& data, const osm::Way& w, const UtmZone& zone) {
  std::vector<Point> pts;
  pts.reserve(w.refs.size());
  for (std::int64_t id : w.refs) pts.push_back(project(data.locations.at(id).latlon(), zone));
  return pts;
}

/// Length-weighted midpoint of a line.
inline Point line_centroid(const std::vector<Point>& line) {
  const double len = polyline_length(line);
  if (len <= 0) return line.front();
  Point acc{};
  for (std::size_t i = 1; i < line.size(); ++i) {
    const double l = distance(line[i - 1], line[i]);
    acc = acc + (l / len) * (0.5 * (line[i - 1] + line[i]));
  }
  return acc;
}

/// Joins outer member ways end-to-end into closed rings; nullopt if any ring stays open.
inline std::optional<std::vector<Ring>> assemble_outer_rings(const osm::Data& data, const osm::Relation& rel,
                                                             const UtmZone& zone) {
  std::vector<std::vector<std::int64_t>> parts;
  for (const osm::Member& m : rel.members) {
    if (m.kind != osm::ElementKind::way || (m.role != "outer" && !m.role.empty())) continue;
    const osm::Way* w = data.find_way(m.ref);
    if (!w) return std::nullopt;
    parts.push_back(w->refs);
  }
  if (parts.empty()) return std::nullopt;
  std::vector<Ring> rings;
  std::vector<bool> used(parts.size(), false);
  for (std::size_t s = 0; s < parts.size(); ++s) {
    if (used[s]) continue;
    used[s] = true;
    std::vector<std::int64_t> ring = parts[s];
    bool grown = true;
    while (ring.front() != ring.back() && grown) {
      grown = false;
      for (std::size_t k = 0; k < parts.size(); ++k) {
        if (used[k]) continue;
        const auto& p = parts[k];
        if (p.front() == ring.back()) {
          ring.insert(ring.end(), p.begin() + 1, p.end());
        } else if (p.back() == ring.back()) {
          ring.insert(ring.end(), p.rbegin() + 1, p.rend());
        } else {
          continue;
        }
        used[k] = grown = true;
        break;
      }
    }
    if (ring.front() != ring.back() || ring.size() < 4) return std::nullopt;
    Ring r;
    for (std::int64_t id : ring) r.push_back(project(data.locations.at(id).latlon(), zone));
    rings.push_back(std::move(r));
  }
  return rings;
}

inline Point multi_ring_centroid(const std::vector<Ring>& rings) {
  double total = 0;
  Point acc{};
  for (const Ring& r : rings) {
    const double a = std::abs(signed_area(r));
    acc = acc + a * centroid(r);
    total += a;
  }
  if (total <= 0) return centroid(rings.front());
  return (1.0 / total) * acc;
}

}  // namespace detail

/// Classified destination points inside the buffered region, one set per class.
///
/// Tagged nodes become points directly; matching closed ways and multipolygon relations
/// contribute their area centroid, open ways their length-weighted midpoint.
inline std::vector<PoiSet> extract_pois(const osm::Data& data, const DestinationQueries& queries,
                                        const BufferedRegion& region, const UtmZone& zone, PoiStats* stats = nullptr) {
  PoiStats local;
  PoiStats& st = stats ? *stats : local;
  std::vector<PoiSet> out;
  for (const auto& [cls, qs] : queries) {
    PoiSet set{cls, {}};
    std::set<std::string> seen;
    auto add = [&](std::string id, Point p, const osm::Tags& tags) {
      if (!region.contains(p)) return;
      if (!seen.insert(id).second) return;
      set.points.push_back({std::move(id), p, tags});
    };
    for (const osm::Node& n : data.tagged_nodes)
      if (matches_any(n.tags, qs)) add("n" + std::to_string(n.id), project(n.location.latlon(), zone), n.tags);
    for (const osm::Way& w : data.ways) {
      if (w.tags.empty() || !matches_any(w.tags, qs)) continue;
      const auto pts = detail::way_points(data, w, zone);
      const Point c = w.closed() ? centroid(pts) : detail::line_centroid(pts);
      add("w" + std::to_string(w.id), c, w.tags);
    }
    for (const osm::Relation& r : data.relations) {
      if (osm::tag(r.tags, "type") != "multipolygon" || !matches_any(r.tags, qs)) continue;
      const auto rings = detail::assemble_outer_rings(data, r, zone);
      if (!rings) {
        ++st.relations_unassembled;
        continue;
      }
      add("r" + std::to_string(r.id), detail::multi_ring_centroid(*rings), r.tags);
    }
    out.push_back(std::move(set));
  }
  return out;
}

}  // namespace pedaccess

#endif  // PEDACCESS_OSM_POIS_HPP

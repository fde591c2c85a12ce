#ifndef PEDACCESS_GEOMETRY_GEOJSON_HPP
#define PEDACCESS_GEOMETRY_GEOJSON_HPP

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pedaccess/error.hpp"
#include "pedaccess/geometry/polygon.hpp"
#include "pedaccess/geometry/projection.hpp"

namespace pedaccess::geojson {

using json = nlohmann::json;

inline json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open GeoJSON file: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("malformed GeoJSON in " + path.string() + ": " + e.what());
  }
}

namespace detail {

inline Point project_position(const json& pos, const UtmZone& zone) {
  if (!pos.is_array() || pos.size() < 2) throw ParseError("GeoJSON position must have two numbers");
  return project(LatLon{pos[1].get<double>(), pos[0].get<double>()}, zone);
}

inline Ring project_ring(const json& ring, const UtmZone& zone) {
  Ring out;
  for (const json& pos : ring) out.push_back(project_position(pos, zone));
  return out;
}

inline Polygon project_polygon(const json& rings, const UtmZone& zone) {
  Polygon p;
  for (std::size_t i = 0; i < rings.size(); ++i) {
    if (i == 0)
      p.outer = project_ring(rings[i], zone);
    else
      p.holes.push_back(project_ring(rings[i], zone));
  }
  normalize(p);
  return p;
}

/// Calls fn(geometry) for every geometry object in a FeatureCollection, Feature or bare geometry.
template <typename Fn>
void for_each_geometry(const json& doc, Fn&& fn) {
  const std::string type = doc.value("type", "");
  if (type == "FeatureCollection") {
    for (const json& f : doc.at("features")) for_each_geometry(f, fn);
  } else if (type == "Feature") {
    if (doc.contains("geometry") && !doc["geometry"].is_null()) for_each_geometry(doc["geometry"], fn);
  } else if (type == "GeometryCollection") {
    for (const json& g : doc.at("geometries")) for_each_geometry(g, fn);
  } else if (!type.empty()) {
    fn(doc);
  } else {
    throw ParseError("GeoJSON object without a type");
  }
}

inline void collect_positions(const json& coords, std::vector<LatLon>& out) {
  if (coords.is_array() && !coords.empty() && coords[0].is_number()) {
    out.push_back({coords[1].get<double>(), coords[0].get<double>()});
    return;
  }
  for (const json& c : coords) collect_positions(c, out);
}

}  // namespace detail

/// All positions of the document, in WGS84.
inline std::vector<LatLon> positions(const json& doc) {
  std::vector<LatLon> out;
  detail::for_each_geometry(doc, [&](const json& g) { detail::collect_positions(g.at("coordinates"), out); });
  return out;
}

/// Polygon and MultiPolygon geometries, projected into the zone.
inline std::vector<Polygon> read_polygons(const json& doc, const UtmZone& zone) {
  std::vector<Polygon> out;
  detail::for_each_geometry(doc, [&](const json& g) {
    const std::string type = g.at("type");
    if (type == "Polygon") {
      out.push_back(detail::project_polygon(g.at("coordinates"), zone));
    } else if (type == "MultiPolygon") {
      for (const json& rings : g.at("coordinates")) out.push_back(detail::project_polygon(rings, zone));
    }
  });
  return out;
}

/// LineString and MultiLineString geometries, projected into the zone.
inline std::vector<std::vector<Point>> read_lines(const json& doc, const UtmZone& zone) {
  std::vector<std::vector<Point>> out;
  detail::for_each_geometry(doc, [&](const json& g) {
    const std::string type = g.at("type");
    if (type == "LineString") {
      out.push_back(detail::project_ring(g.at("coordinates"), zone));
    } else if (type == "MultiLineString") {
      for (const json& line : g.at("coordinates")) out.push_back(detail::project_ring(line, zone));
    }
  });
  return out;
}

/// Point and MultiPoint geometries, projected into the zone.
inline std::vector<Point> read_points(const json& doc, const UtmZone& zone) {
  std::vector<Point> out;
  detail::for_each_geometry(doc, [&](const json& g) {
    const std::string type = g.at("type");
    if (type == "Point") {
      out.push_back(detail::project_position(g.at("coordinates"), zone));
    } else if (type == "MultiPoint") {
      for (const json& pos : g.at("coordinates")) out.push_back(detail::project_position(pos, zone));
    }
  });
  return out;
}

inline json position(Point p, const UtmZone& zone) {
  const LatLon ll = unproject(p, zone);
  return json::array({ll.lon, ll.lat});
}

inline json polygon_geometry(const Polygon& poly, const UtmZone& zone) {
  json rings = json::array();
  auto ring_json = [&](const Ring& r) {
    json out = json::array();
    for (const Point& p : r) out.push_back(position(p, zone));
    return out;
  };
  rings.push_back(ring_json(poly.outer));
  for (const Ring& h : poly.holes) rings.push_back(ring_json(h));
  return json{{"type", "Polygon"}, {"coordinates", rings}};
}

inline json point_geometry(Point p, const UtmZone& zone) {
  return json{{"type", "Point"}, {"coordinates", position(p, zone)}};
}

inline json feature_collection(json features = json::array()) {
  return json{{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

inline void write_file(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump() << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace pedaccess::geojson

#endif  // PEDACCESS_GEOMETRY_GEOJSON_HPP

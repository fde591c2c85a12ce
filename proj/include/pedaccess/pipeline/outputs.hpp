#ifndef PEDACCESS_PIPELINE_OUTPUTS_HPP
#define PEDACCESS_PIPELINE_OUTPUTS_HPP

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pedaccess/auxdata/csv.hpp"
#include "pedaccess/geometry/geojson.hpp"
#include "pedaccess/geometry/hexgrid.hpp"
#include "pedaccess/indicators/aggregate.hpp"

namespace pedaccess {

inline constexpr const char* kHexIdColumn = "hex_id";

/// Output column names of a frame: the key column(s) first, then the indicators.
inline std::vector<std::string> output_columns(const IndicatorFrame& f) {
  std::vector<std::string> out;
  if (f.level == IndicatorFrame::Level::hex) out.push_back(kHexIdColumn);
  out.push_back(col::region);
  out.insert(out.end(), f.columns.begin(), f.columns.end());
  return out;
}

/// True for the indicator dictionary names and the `pct_access_{d}m_{class}_{method}`
/// family (also with the city-level `pop_` prefix).
inline bool is_dictionary_column(const std::string& name) {
  static const std::set<std::string> fixed{
      kHexIdColumn,  col::region,   col::area,      col::population, col::pop_density, col::intersections,
      col::intersection_density,    col::sample_count, col::local_pop, col::local_int, col::local_daily,
      col::local_walk, col::z_pop,  col::z_int,     col::z_daily,    col::z_walk,      col::pop_pop,
      col::pop_int,  col::pop_daily, col::pop_walk, col::pop_z_pop,  col::pop_z_int,   col::pop_z_daily,
      col::pop_z_walk};
  if (fixed.count(name)) return true;
  std::string_view s = name;
  if (s.starts_with("pop_")) s.remove_prefix(4);
  if (!s.starts_with("pct_access_")) return false;
  s.remove_prefix(11);
  const auto m = s.find("m_");
  if (m == std::string_view::npos || m == 0) return false;
  const auto d = csv::to_double(s.substr(0, m));
  if (!d || !(*d > 0)) return false;
  const auto rest = s.substr(m + 2);
  for (const char* method : {"_binary", "_soft", "_gaussian"})
    if (rest.size() > std::string_view(method).size() && rest.ends_with(method)) return true;
  return false;
}

/// Rejects duplicate or out-of-dictionary column names.
inline void validate_frame(const IndicatorFrame& f) {
  std::set<std::string> seen;
  for (const auto& c : output_columns(f)) {
    if (!seen.insert(c).second) throw Error("output property name collision: " + c);
    if (!is_dictionary_column(c)) throw Error("output property not in the indicator dictionary: " + c);
  }
  for (const auto& r : f.rows)
    if (r.values.size() != f.columns.size()) throw Error("indicator frame row has the wrong width");
}

inline std::string frame_csv(const IndicatorFrame& f) {
  validate_frame(f);
  std::ostringstream out;
  csv::write_row(out, output_columns(f));
  for (const auto& r : f.rows) {
    csv::Row row;
    if (f.level == IndicatorFrame::Level::hex) row.push_back(std::to_string(r.hex_id));
    row.push_back(r.region);
    for (double v : r.values) row.push_back(csv::format_number(v));
    csv::write_row(out, row);
  }
  return out.str();
}

inline nlohmann::json frame_properties(const IndicatorFrame& f, const IndicatorFrame::Row& r) {
  nlohmann::json p = nlohmann::json::object();
  if (f.level == IndicatorFrame::Level::hex) p[kHexIdColumn] = r.hex_id;
  p[col::region] = r.region;
  for (std::size_t i = 0; i < f.columns.size(); ++i)
    p[f.columns[i]] = std::isnan(r.values[i]) ? nlohmann::json(nullptr) : nlohmann::json(r.values[i]);
  return p;
}

/// Hex frame as WGS84 polygons; the feature id is the hex id.
inline nlohmann::json hex_feature_collection(const IndicatorFrame& f, const HexGrid& grid, const UtmZone& zone) {
  validate_frame(f);
  nlohmann::json features = nlohmann::json::array();
  for (const auto& r : f.rows)
    features.push_back({{"type", "Feature"},
                        {"id", r.hex_id},
                        {"geometry", geojson::polygon_geometry(grid[r.hex_id].polygon(), zone)},
                        {"properties", frame_properties(f, r)}});
  return geojson::feature_collection(std::move(features));
}

struct RegionGeometry {
  std::vector<Polygon> parts;
  UtmZone zone;
};

/// City frame with each region's boundary as a WGS84 MultiPolygon (null when unknown).
inline nlohmann::json city_feature_collection(const IndicatorFrame& f,
                                              const std::map<std::string, RegionGeometry>& regions) {
  validate_frame(f);
  nlohmann::json features = nlohmann::json::array();
  for (const auto& r : f.rows) {
    nlohmann::json geom = nullptr;
    if (auto it = regions.find(r.region); it != regions.end() && !it->second.parts.empty()) {
      nlohmann::json polys = nlohmann::json::array();
      for (const Polygon& p : it->second.parts) polys.push_back(geojson::polygon_geometry(p, it->second.zone)["coordinates"]);
      geom = {{"type", "MultiPolygon"}, {"coordinates", std::move(polys)}};
    }
    features.push_back({{"type", "Feature"}, {"id", r.region}, {"geometry", geom}, {"properties", frame_properties(f, r)}});
  }
  return geojson::feature_collection(std::move(features));
}

}  // namespace pedaccess

#endif  // PEDACCESS_PIPELINE_OUTPUTS_HPP

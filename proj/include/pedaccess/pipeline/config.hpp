#ifndef PEDACCESS_PIPELINE_CONFIG_HPP
#define PEDACCESS_PIPELINE_CONFIG_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "pedaccess/auxdata/csv.hpp"
#include "pedaccess/error.hpp"
#include "pedaccess/indicators/scores.hpp"
#include "pedaccess/osm/pois.hpp"

namespace pedaccess {

enum class BoundaryMode { ucdb_only, intersection, custom };
enum class PtSource { osm, gtfs, both };
enum class RasterFrame { projected, wgs84 };

inline std::string to_string(BoundaryMode m) {
  switch (m) {
    case BoundaryMode::ucdb_only:
      return "ucdb_only";
    case BoundaryMode::intersection:
      return "intersection";
    case BoundaryMode::custom:
      return "custom";
  }
  return "custom";
}
inline std::string to_string(PtSource s) { return s == PtSource::osm ? "osm" : s == PtSource::gtfs ? "gtfs" : "both"; }
inline std::string to_string(RasterFrame f) { return f == RasterFrame::wgs84 ? "wgs84" : "projected"; }

struct RegionConfig {
  std::string name;
  BoundaryMode boundary_mode = BoundaryMode::custom;
  std::vector<std::string> boundary_files;
  std::string osm_file;
  std::string population_raster;
  RasterFrame raster_frame = RasterFrame::projected;
  std::optional<int> utm_zone_override;
  bool utm_south = false;
  std::optional<std::string> gtfs_feed;
  std::optional<std::string> official_edges;
  std::optional<std::string> official_destinations;
};

struct ProjectConfig {
  std::vector<RegionConfig> regions;
  double sample_interval_m = 30;
  double hex_diagonal_m = 250;
  double neighborhood_distance_m = 1000;
  double access_distance_m = 500;
  double buffer_m = 1600;
  double pop_threshold = 5;
  double intersection_tolerance_m = 12;
  double snap_max_m = 500;
  double destination_cutoff_m = 1600;
  AccessMethod access_method = AccessMethod::binary;
  AccessParams access_params;  // t always equals access_distance_m
  PtSource pt_source = PtSource::both;
  DestinationQueries destination_queries;
  std::string validation_class = "fresh_food_market";
  std::size_t ground_truth_per_quintile = 10;
  std::string output_dir = "output";
  std::filesystem::path base_dir;  // directory relative paths resolve against

  std::filesystem::path resolve(const std::string& p) const {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  }
  const RegionConfig& region(const std::string& name) const {
    for (const auto& r : regions)
      if (r.name == name) return r;
    throw ConfigError("unknown region '" + name + "'");
  }
  std::vector<std::string> destination_classes() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : destination_queries) out.push_back(k);
    return out;
  }
};

/// Tag queries used when the config names no destinations.
inline DestinationQueries default_destination_queries() {
  return {
      {"fresh_food_market",
       {{"shop", "supermarket"}, {"shop", "greengrocer"}, {"shop", "grocery"}, {"shop", "butcher"},
        {"shop", "seafood"}, {"shop", "bakery"}, {"amenity", "marketplace"}}},
      {"convenience", {{"shop", "convenience"}, {"shop", "kiosk"}, {"amenity", "cafe"}, {"shop", "newsagent"}}},
      {"pt_any",
       {{"highway", "bus_stop"}, {"public_transport", "platform"}, {"public_transport", "stop_position"},
        {"railway", "station"}, {"railway", "tram_stop"}, {"railway", "halt"}, {"amenity", "ferry_terminal"}}},
      {"public_open_space_any", {{"leisure", "park"}, {"leisure", "garden"}, {"leisure", "playground"},
                                 {"landuse", "recreation_ground"}, {"leisure", "nature_reserve"}}},
  };
}

namespace detail {

inline double positive_length(const YAML::Node& n, const char* key, double fallback) {
  if (!n[key]) return fallback;
  double v;
  try {
    v = n[key].as<double>();
  } catch (const YAML::Exception&) {
    throw ConfigError(std::string(key) + " must be a number");
  }
  if (!(v > 0)) throw ConfigError(std::string("non-positive length: ") + key);
  return v;
}

inline std::string required_string(const YAML::Node& n, const char* key, const std::string& where) {
  if (!n[key] || !n[key].IsScalar() || n[key].as<std::string>().empty())
    throw ConfigError("missing required key '" + std::string(key) + "' in " + where);
  return n[key].as<std::string>();
}

inline std::optional<std::string> optional_string(const YAML::Node& n, const char* key) {
  if (!n[key] || n[key].IsNull()) return std::nullopt;
  return n[key].as<std::string>();
}

}  // namespace detail

inline ProjectConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".") {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config must be a mapping");
  static const std::set<std::string> known{"regions", "sample_interval_m", "hex_diagonal_m", "neighborhood_distance_m",
                                           "access_distance_m", "buffer_m", "pop_threshold", "intersection_tolerance_m",
                                           "snap_max_m", "destination_cutoff_m", "access_method", "access_params",
                                           "pt_source", "destinations", "validation", "output_dir"};
  for (const auto& kv : root)
    if (!known.count(kv.first.as<std::string>())) throw ConfigError("unknown config key '" + kv.first.as<std::string>() + "'");

  ProjectConfig c;
  c.base_dir = base_dir;
  try {
    using detail::positive_length;
    c.sample_interval_m = positive_length(root, "sample_interval_m", c.sample_interval_m);
    c.hex_diagonal_m = positive_length(root, "hex_diagonal_m", c.hex_diagonal_m);
    c.neighborhood_distance_m = positive_length(root, "neighborhood_distance_m", c.neighborhood_distance_m);
    c.access_distance_m = positive_length(root, "access_distance_m", c.access_distance_m);
    c.buffer_m = positive_length(root, "buffer_m", c.buffer_m);
    c.intersection_tolerance_m = positive_length(root, "intersection_tolerance_m", c.intersection_tolerance_m);
    c.snap_max_m = positive_length(root, "snap_max_m", c.snap_max_m);
    c.destination_cutoff_m = positive_length(root, "destination_cutoff_m", c.destination_cutoff_m);
    if (root["pop_threshold"]) {
      c.pop_threshold = root["pop_threshold"].as<double>();
      if (!(c.pop_threshold >= 0)) throw ConfigError("pop_threshold must be non-negative");
    }
    if (root["access_method"]) c.access_method = parse_access_method(root["access_method"].as<std::string>());
    c.access_params.t = c.access_distance_m;
    if (const auto p = root["access_params"]) {
      if (!p.IsMap()) throw ConfigError("access_params must be a mapping");
      for (const auto& kv : p) {
        const auto k = kv.first.as<std::string>();
        if (k != "t" && k != "k" && k != "v") throw ConfigError("unknown access_params key '" + k + "'");
      }
      if (p["t"] && p["t"].as<double>() != c.access_distance_m)
        throw ConfigError("access_params.t must equal access_distance_m");
      if (p["k"]) c.access_params.k = p["k"].as<double>();
      if (p["v"]) c.access_params.v = p["v"].as<double>();
      c.access_params.validate();
    }
    if (c.destination_cutoff_m < c.access_distance_m)
      throw ConfigError("destination_cutoff_m must be at least access_distance_m");
    if (root["pt_source"]) {
      const auto s = root["pt_source"].as<std::string>();
      if (s == "osm")
        c.pt_source = PtSource::osm;
      else if (s == "gtfs")
        c.pt_source = PtSource::gtfs;
      else if (s == "both")
        c.pt_source = PtSource::both;
      else
        throw ConfigError("unknown pt_source '" + s + "'");
    }
    if (root["output_dir"]) c.output_dir = root["output_dir"].as<std::string>();
    if (const auto v = root["validation"]) {
      if (v["class"]) c.validation_class = v["class"].as<std::string>();
      if (v["per_quintile"]) {
        const auto n = v["per_quintile"].as<long long>();
        if (n <= 0) throw ConfigError("validation.per_quintile must be positive");
        c.ground_truth_per_quintile = static_cast<std::size_t>(n);
      }
    }

    if (const auto d = root["destinations"]) {
      if (!d.IsMap()) throw ConfigError("destinations must map class names to tag queries");
      for (const auto& kv : d) {
        const auto cls = kv.first.as<std::string>();
        std::vector<TagQuery> qs;
        for (const auto& q : kv.second) {
          if (q.IsScalar()) {
            // "key=value" or "key" (any value)
            const auto s = q.as<std::string>();
            const auto eq = s.find('=');
            qs.push_back(eq == std::string::npos ? TagQuery{s, "*"} : TagQuery{s.substr(0, eq), s.substr(eq + 1)});
          } else {
            qs.push_back({detail::required_string(q, "key", "destination " + cls),
                          q["value"] ? q["value"].as<std::string>() : "*"});
          }
        }
        if (qs.empty()) throw ConfigError("destination class '" + cls + "' has no tag queries");
        c.destination_queries[cls] = std::move(qs);
      }
    } else {
      c.destination_queries = default_destination_queries();
    }

    const auto regions = root["regions"];
    if (!regions || !regions.IsSequence() || regions.size() == 0) throw ConfigError("missing required key 'regions'");
    std::set<std::string> names;
    for (const auto& rn : regions) {
      RegionConfig r;
      r.name = detail::required_string(rn, "name", "region");
      const std::string where = "region " + r.name;
      if (!names.insert(r.name).second) throw ConfigError("duplicate region name '" + r.name + "'");
      for (char ch : r.name)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-'))
          throw ConfigError("region name '" + r.name + "' may only use letters, digits, '_' and '-'");
      const std::string mode = rn["boundary_mode"] ? rn["boundary_mode"].as<std::string>() : "custom";
      if (mode == "ucdb_only")
        r.boundary_mode = BoundaryMode::ucdb_only;
      else if (mode == "intersection")
        r.boundary_mode = BoundaryMode::intersection;
      else if (mode == "custom")
        r.boundary_mode = BoundaryMode::custom;
      else
        throw ConfigError("unknown boundary_mode '" + mode + "' in " + where);
      const auto bf = rn["boundary_files"];
      if (!bf) throw ConfigError("missing required key 'boundary_files' in " + where);
      if (bf.IsScalar()) {
        r.boundary_files.push_back(bf.as<std::string>());
      } else {
        for (const auto& f : bf) r.boundary_files.push_back(f.as<std::string>());
      }
      const std::size_t need = r.boundary_mode == BoundaryMode::intersection ? 2 : 1;
      if (r.boundary_files.size() != need)
        throw ConfigError(where + ": boundary_mode " + mode + " needs exactly " + std::to_string(need) +
                          " boundary file(s)");
      r.osm_file = detail::required_string(rn, "osm_file", where);
      r.population_raster = detail::required_string(rn, "population_raster", where);
      if (rn["population_raster_frame"]) {
        const auto f = rn["population_raster_frame"].as<std::string>();
        if (f == "wgs84")
          r.raster_frame = RasterFrame::wgs84;
        else if (f != "projected")
          throw ConfigError("unknown population_raster_frame '" + f + "' in " + where);
      }
      if (rn["utm_zone"]) {
        const int z = rn["utm_zone"].as<int>();
        if (z < 1 || z > 60) throw ConfigError("utm_zone must be in 1..60 in " + where);
        r.utm_zone_override = z;
      }
      if (rn["utm_south"]) r.utm_south = rn["utm_south"].as<bool>();
      r.gtfs_feed = detail::optional_string(rn, "gtfs_feed");
      r.official_edges = detail::optional_string(rn, "official_edges");
      r.official_destinations = detail::optional_string(rn, "official_destinations");
      c.regions.push_back(std::move(r));
    }
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("invalid config value: ") + e.what());
  }
  return c;
}

inline ProjectConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

/// Canonical text form: every key written with its effective value, fixed order.
inline std::string serialize_config(const ProjectConfig& c) {
  YAML::Emitter out;
  auto num = [](double v) { return csv::format_number(v); };
  out << YAML::BeginMap;
  out << YAML::Key << "output_dir" << YAML::Value << c.output_dir;
  out << YAML::Key << "sample_interval_m" << YAML::Value << num(c.sample_interval_m);
  out << YAML::Key << "hex_diagonal_m" << YAML::Value << num(c.hex_diagonal_m);
  out << YAML::Key << "neighborhood_distance_m" << YAML::Value << num(c.neighborhood_distance_m);
  out << YAML::Key << "access_distance_m" << YAML::Value << num(c.access_distance_m);
  out << YAML::Key << "buffer_m" << YAML::Value << num(c.buffer_m);
  out << YAML::Key << "pop_threshold" << YAML::Value << num(c.pop_threshold);
  out << YAML::Key << "intersection_tolerance_m" << YAML::Value << num(c.intersection_tolerance_m);
  out << YAML::Key << "snap_max_m" << YAML::Value << num(c.snap_max_m);
  out << YAML::Key << "destination_cutoff_m" << YAML::Value << num(c.destination_cutoff_m);
  out << YAML::Key << "access_method" << YAML::Value << to_string(c.access_method);
  out << YAML::Key << "access_params" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "k" << YAML::Value << num(c.access_params.k);
  out << YAML::Key << "v" << YAML::Value << num(c.access_params.v);
  out << YAML::EndMap;
  out << YAML::Key << "pt_source" << YAML::Value << to_string(c.pt_source);
  out << YAML::Key << "validation" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "class" << YAML::Value << c.validation_class;
  out << YAML::Key << "per_quintile" << YAML::Value << c.ground_truth_per_quintile;
  out << YAML::EndMap;
  out << YAML::Key << "destinations" << YAML::Value << YAML::BeginMap;
  for (const auto& [cls, qs] : c.destination_queries) {
    out << YAML::Key << cls << YAML::Value << YAML::BeginSeq;
    for (const auto& q : qs) out << YAML::Flow << YAML::BeginMap << YAML::Key << "key" << YAML::Value << q.key
                                 << YAML::Key << "value" << YAML::Value << q.value << YAML::EndMap;
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;
  out << YAML::Key << "regions" << YAML::Value << YAML::BeginSeq;
  for (const auto& r : c.regions) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << r.name;
    out << YAML::Key << "boundary_mode" << YAML::Value << to_string(r.boundary_mode);
    out << YAML::Key << "boundary_files" << YAML::Value << YAML::Flow << r.boundary_files;
    out << YAML::Key << "osm_file" << YAML::Value << r.osm_file;
    out << YAML::Key << "population_raster" << YAML::Value << r.population_raster;
    out << YAML::Key << "population_raster_frame" << YAML::Value << to_string(r.raster_frame);
    if (r.utm_zone_override) out << YAML::Key << "utm_zone" << YAML::Value << *r.utm_zone_override;
    out << YAML::Key << "utm_south" << YAML::Value << r.utm_south;
    if (r.gtfs_feed) out << YAML::Key << "gtfs_feed" << YAML::Value << *r.gtfs_feed;
    if (r.official_edges) out << YAML::Key << "official_edges" << YAML::Value << *r.official_edges;
    if (r.official_destinations) out << YAML::Key << "official_destinations" << YAML::Value << *r.official_destinations;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace pedaccess

#endif  // PEDACCESS_PIPELINE_CONFIG_HPP

#ifndef PEDACCESS_PIPELINE_STAGES_HPP
#define PEDACCESS_PIPELINE_STAGES_HPP

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pedaccess/auxdata/gtfs.hpp"
#include "pedaccess/auxdata/raster.hpp"
#include "pedaccess/geometry/boundary.hpp"
#include "pedaccess/geometry/geojson.hpp"
#include "pedaccess/indicators/aggregate.hpp"
#include "pedaccess/indicators/estimates.hpp"
#include "pedaccess/network/intersections.hpp"
#include "pedaccess/osm/reader.hpp"
#include "pedaccess/pipeline/config.hpp"
#include "pedaccess/pipeline/manifest.hpp"
#include "pedaccess/pipeline/outputs.hpp"
#include "pedaccess/pipeline/persist.hpp"
#include "pedaccess/validation/ground_truth.hpp"
#include "pedaccess/validation/overlap.hpp"

namespace pedaccess {

enum class Stage { ingest, sample, aggregate, validate };
using StageSet = std::set<Stage>;

inline std::string to_string(Stage s) {
  switch (s) {
    case Stage::ingest:
      return "ingest";
    case Stage::sample:
      return "sample";
    case Stage::aggregate:
      return "aggregate";
    case Stage::validate:
      return "validate";
  }
  return "?";
}

inline StageSet all_stages() { return {Stage::ingest, Stage::sample, Stage::aggregate, Stage::validate}; }

/// Error raised inside a stage, tagged with where it happened.
class StageError : public Error {
 public:
  StageError(std::string region, Stage stage, const std::string& what)
      : Error((region.empty() ? std::string() : "region " + region + ", ") + "stage " + to_string(stage) + ": " + what),
        region_(std::move(region)),
        stage_(stage) {}
  const std::string& region() const { return region_; }
  Stage stage() const { return stage_; }

 private:
  std::string region_;
  Stage stage_;
};

struct RunOptions {
  std::filesystem::path out_dir;     // empty: the config's output_dir
  std::vector<std::string> regions;  // empty: every configured region
  unsigned threads = 1;
  std::uint64_t seed = 1;
  std::optional<std::filesystem::path> official_edges;  // override the region's configured layer
  std::optional<std::filesystem::path> official_dests;
  std::optional<std::filesystem::path> review;  // completed ground-truth sheet to tally
  std::vector<double> radii{10, 50};
  double destination_radius = 10;
};

/// Projection context and core boundary of an ingested region.
struct RegionContext {
  std::string name;
  UtmZone zone;
  std::vector<Polygon> core;
  double buffer_m = 0;
  double hex_diagonal_m = 0;
  double area_km2 = 0;
  double population = 0;
  std::int64_t intersections = 0;

  BufferedRegion region() const { return BufferedRegion(core, buffer_m); }
  HexGrid grid() const { return HexGrid(region().buffered_extent(), hex_diagonal_m); }
};

namespace detail {

using json = nlohmann::json;

inline json polygon_json(const Polygon& p) {
  auto ring = [](const Ring& r) {
    json a = json::array();
    for (const Point& q : r) a.push_back({q.x, q.y});
    return a;
  };
  json rings = json::array({ring(p.outer)});
  for (const Ring& h : p.holes) rings.push_back(ring(h));
  return rings;
}

inline Polygon polygon_from_json(const json& rings) {
  Polygon p;
  for (std::size_t i = 0; i < rings.size(); ++i) {
    Ring r;
    for (const json& q : rings[i]) r.push_back({q.at(0).get<double>(), q.at(1).get<double>()});
    (i == 0 ? p.outer : p.holes.emplace_back()) = std::move(r);
  }
  return p;
}

inline json context_json(const RegionContext& c) {
  json j;
  j["name"] = c.name;
  j["utm_zone"] = {{"number", c.zone.number}, {"south", c.zone.south}};
  j["buffer_m"] = c.buffer_m;
  j["hex_diagonal_m"] = c.hex_diagonal_m;
  j["area_km2"] = c.area_km2;
  j["population"] = c.population;
  j["intersections"] = c.intersections;
  j["core"] = json::array();
  for (const Polygon& p : c.core) j["core"].push_back(polygon_json(p));
  return j;
}

inline RegionContext load_context(const std::filesystem::path& dir, const ProjectConfig& cfg) {
  const json j = persist::read_upstream_json(dir / "region.json");
  RegionContext c;
  try {
    c.name = j.at("name").get<std::string>();
    c.zone = {j.at("utm_zone").at("number").get<int>(), j.at("utm_zone").at("south").get<bool>()};
    c.buffer_m = j.at("buffer_m").get<double>();
    c.hex_diagonal_m = j.at("hex_diagonal_m").get<double>();
    c.area_km2 = j.at("area_km2").get<double>();
    c.population = j.at("population").get<double>();
    c.intersections = j.at("intersections").get<std::int64_t>();
    for (const json& p : j.at("core")) c.core.push_back(polygon_from_json(p));
  } catch (const json::exception& e) {
    throw ParseError("malformed region.json: " + std::string(e.what()));
  }
  if (c.buffer_m != cfg.buffer_m || c.hex_diagonal_m != cfg.hex_diagonal_m)
    throw Error("ingest outputs were produced with a different buffer or hex size; rerun the ingest stage");
  return c;
}

inline std::string mean_text(std::optional<double> v) { return v ? csv::format_number(*v) : std::string(); }

inline void record_input(RunManifest& m, const std::filesystem::path& p) {
  if (!std::filesystem::exists(p)) throw Error("input file not found: " + p.string());
  if (std::filesystem::is_directory(p)) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::recursive_directory_iterator(p))
      if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) m.inputs[f.string()] = sha256_file(f);
  } else {
    m.inputs[p.string()] = sha256_file(p);
  }
}

inline UtmZone region_zone(const RegionConfig& r, const std::vector<json>& boundary_docs) {
  std::vector<LatLon> pts = geojson::positions(boundary_docs.front());
  if (pts.empty()) throw ParseError("boundary file has no coordinates");
  double lat = 0, lon = 0;
  for (const auto& p : pts) lat += p.lat, lon += p.lon;
  lat /= static_cast<double>(pts.size());
  lon /= static_cast<double>(pts.size());
  UtmZone z = utm_zone_for(LatLon{lat, lon});
  if (r.utm_zone_override) z = {*r.utm_zone_override, r.utm_south};
  return z;
}

}  // namespace detail

// ---- ingest --------------------------------------------------------------------

inline nlohmann::json ingest_region(const ProjectConfig& cfg, const RegionConfig& rc, OutputWriter& w,
                                    RunManifest& manifest) {
  using json = nlohmann::json;
  json diag;
  std::vector<json> docs;
  for (const auto& f : rc.boundary_files) {
    const auto p = cfg.resolve(f);
    detail::record_input(manifest, p);
    docs.push_back(geojson::read_file(p));
  }
  RegionContext ctx;
  ctx.name = rc.name;
  ctx.zone = detail::region_zone(rc, docs);
  ctx.buffer_m = cfg.buffer_m;
  ctx.hex_diagonal_m = cfg.hex_diagonal_m;
  if (rc.boundary_mode == BoundaryMode::intersection) {
    ctx.core = polygon_intersection(geojson::read_polygons(docs[0], ctx.zone), geojson::read_polygons(docs[1], ctx.zone));
    if (ctx.core.empty()) throw Error("the two boundary files do not intersect");
  } else {
    ctx.core = geojson::read_polygons(docs[0], ctx.zone);
    if (ctx.core.empty()) throw Error("boundary file holds no polygon");
  }
  for (const Polygon& p : ctx.core) validate(p);
  const BufferedRegion region = ctx.region();
  ctx.area_km2 = region.area() * 1e-6;

  const auto osm_path = cfg.resolve(rc.osm_file);
  detail::record_input(manifest, osm_path);
  const osm::Data data = osm::load_osm(osm_path);
  GraphBuildStats gstats;
  const PedestrianGraph g = build_pedestrian_graph(data, region, ctx.zone, &gstats, true);
  PoiStats pstats;
  std::vector<PoiSet> pois = extract_pois(data, cfg.destination_queries, region, ctx.zone, &pstats);
  diag["osm"] = {{"nodes", data.diagnostics.nodes},
                 {"ways", data.diagnostics.ways},
                 {"relations", data.diagnostics.relations},
                 {"ways_missing_nodes", data.diagnostics.ways_missing_nodes},
                 {"pedestrian_ways", gstats.ways_used},
                 {"stubs_dropped", gstats.stubs_dropped},
                 {"zero_length_dropped", gstats.zero_length_dropped},
                 {"relations_unassembled", pstats.relations_unassembled}};
  diag["graph"] = {{"nodes", g.node_count()}, {"edges", g.edge_count()}, {"length_m", g.total_length()}};

  auto pt = std::find_if(pois.begin(), pois.end(), [](const PoiSet& s) { return s.destination_class == "pt_any"; });
  if (pt != pois.end() && cfg.pt_source != PtSource::osm) {
    if (!rc.gtfs_feed) {
      if (cfg.pt_source == PtSource::gtfs) throw ConfigError("pt_source gtfs needs a gtfs_feed for region " + rc.name);
      diag["gtfs"] = "no feed configured; OSM stops only";
    } else {
      const auto gp = cfg.resolve(*rc.gtfs_feed);
      detail::record_input(manifest, gp);
      const gtfs::Feed feed = gtfs::load_feed(gp);
      gtfs::StopPoiStats sstats;
      const PoiSet stops = gtfs::stops_as_pois(feed, region, ctx.zone, &sstats);
      if (cfg.pt_source == PtSource::gtfs)
        pt->points = stops.points;
      else
        merge_pois(*pt, stops);
      const auto& d = feed.diagnostics;
      diag["gtfs"] = {{"stops", feed.stops.size()},
                      {"stops_in_region", stops.points.size()},
                      {"stops_outside_region", sstats.outside_region},
                      {"stops_bad_coordinates", d.stops_bad_coordinates},
                      {"trips_unknown_service", d.trips_unknown_service},
                      {"stop_times_unknown_trip", d.stop_times_unknown_trip},
                      {"stop_times_unknown_stop", d.stop_times_unknown_stop},
                      {"stop_times_bad_time", d.stop_times_bad_time},
                      {"trips_non_monotonic", d.trips_non_monotonic},
                      {"calendar_bad_rows", d.calendar_bad_rows}};
    }
  }
  for (const auto& s : pois) diag["pois"][s.destination_class] = s.points.size();

  HexGrid grid = ctx.grid();
  const auto raster_path = cfg.resolve(rc.population_raster);
  detail::record_input(manifest, raster_path);
  PopulationRaster raster = read_raster(raster_path);
  if (rc.raster_frame == RasterFrame::wgs84) raster.geographic = ctx.zone;
  const auto pops = hex_populations(raster, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) grid.cells()[i].set_population(pops[i]);
  ctx.population = region_population(raster, ctx.core);

  IntersectionSet inter;
  if (!g.empty()) inter = consolidate_intersections(g, cfg.intersection_tolerance_m);
  assign_intersections(inter, grid);
  std::vector<std::int64_t> inter_hex;
  for (const Point& p : inter.points) {
    inter_hex.push_back(grid.locate(p).value_or(-1));
    if (region.contains_core(p)) ++ctx.intersections;
  }
  diag["hexes"] = grid.size();
  diag["raster_nodata_cells"] = raster.nodata_cells;
  diag["intersections"] = {{"candidate_nodes", inter.candidate_nodes},
                           {"consolidated", inter.points.size()},
                           {"in_core", ctx.intersections},
                           {"outside_grid", inter.outside_grid}};

  const std::filesystem::path dir = rc.name;
  w.write(dir / "nodes.csv", persist::nodes_csv(g));
  w.write(dir / "edges.csv", persist::edges_csv(g));
  w.write(dir / "pois.csv", persist::pois_csv(pois));
  w.write(dir / "hexes.csv", persist::hexes_csv(grid));
  w.write(dir / "intersections.csv", persist::intersections_csv(inter.points, inter_hex));
  w.write(dir / "region.json", detail::context_json(ctx).dump(2) + "\n");
  return diag;
}

// ---- sample --------------------------------------------------------------------

/// Sample-point estimates for one ingested region (in-memory; also used by the CLI-free tests).
inline SampleEstimates compute_samples(const ProjectConfig& cfg, const RegionContext& ctx, const PedestrianGraph& g,
                                       const HexGrid& grid, const std::vector<PoiSet>& pois, unsigned threads,
                                       nlohmann::json* diag = nullptr) {
  std::vector<LocalDensity> density;
  std::vector<NodeDistanceField> fields;
  if (!g.empty()) {
    const auto node_hex = assign_nodes_to_hexes(g, grid);
    density = node_local_density(node_catchments(g, node_hex, cfg.neighborhood_distance_m, threads), grid);
    const NodeSnapper snapper(g, cfg.snap_max_m);
    for (const PoiSet& s : pois) fields.push_back(nearest_destination_field(g, snapper, s, cfg.destination_cutoff_m));
  } else {
    for (const PoiSet& s : pois) fields.push_back({s.destination_class, cfg.destination_cutoff_m, {}, {}, 0, s.points.size()});
  }
  auto points = generate_sample_points(g, cfg.sample_interval_m);
  const std::size_t generated = points.size();
  assign_hexes(points, grid);
  points = restrict_to_region(points, ctx.region());
  const std::size_t in_core = points.size();
  points = filter_sample_points(points, grid, cfg.pop_threshold);
  const std::size_t populated = points.size();
  EstimateOptions opt{cfg.access_params, cfg.access_method, threads};
  SampleEstimates est = estimate_samples(points, g, density, fields, opt);
  if (diag) {
    (*diag)["sample_points"] = {{"generated", generated},
                                {"in_core", in_core},
                                {"populated", populated},
                                {"omitted", est.omitted},
                                {"retained", est.size()},
                                {"degenerate_z", est.degenerate_z}};
    for (const auto& f : fields)
      (*diag)["destinations"][f.destination_class] = {{"snapped", f.pois_snapped}, {"dropped", f.pois_dropped},
                                                      {"source_nodes", f.snapped_nodes.size()}};
  }
  return est;
}

inline nlohmann::json sample_region(const ProjectConfig& cfg, const RegionConfig& rc, OutputWriter& w,
                                    unsigned threads) {
  const auto dir = w.root() / rc.name;
  const RegionContext ctx = detail::load_context(dir, cfg);
  HexGrid grid = ctx.grid();
  persist::load_hex_attributes(dir, grid);
  const PedestrianGraph g = persist::load_graph(dir);
  const auto pois = persist::load_pois(dir, cfg.destination_classes());
  nlohmann::json diag;
  const SampleEstimates est = compute_samples(cfg, ctx, g, grid, pois, threads, &diag);
  w.write(std::filesystem::path(rc.name) / "samples.csv", persist::samples_csv(est));
  return diag;
}

// ---- aggregate -----------------------------------------------------------------

struct AggregateResult {
  std::vector<IndicatorFrame> hex;  // one per region, in region order
  IndicatorFrame city;
  bool pooled_z = false;
  bool degenerate = false;
};

/// Hex and city frames for the given regions; between-city z-scores pool all their hexes.
inline AggregateResult aggregate_frames(const ProjectConfig& cfg, const std::vector<RegionContext>& contexts,
                                        const std::vector<HexGrid>& grids, const std::vector<SampleEstimates>& est) {
  AggregateResult out;
  const auto classes = cfg.destination_classes();
  std::size_t hexes = 0;
  for (std::size_t i = 0; i < contexts.size(); ++i) {
    out.hex.push_back(aggregate_hex(est[i], grids[i], contexts[i].name, cfg.access_distance_m));
    hexes += out.hex.back().rows.size();
  }
  if (hexes >= 2) {
    std::vector<IndicatorFrame*> ptrs;
    for (auto& f : out.hex) ptrs.push_back(&f);
    out.degenerate = between_city_z(ptrs);
    out.pooled_z = true;
  }
  out.city = empty_city_frame(classes, cfg.access_distance_m, cfg.access_method);
  for (std::size_t i = 0; i < contexts.size(); ++i) {
    const RegionStats stats{contexts[i].name, contexts[i].area_km2, contexts[i].population, contexts[i].intersections};
    out.city.rows.push_back(aggregate_city(out.hex[i], stats, classes, cfg.access_distance_m, cfg.access_method));
  }
  return out;
}

inline nlohmann::json aggregate_regions(const ProjectConfig& cfg, const std::vector<const RegionConfig*>& regions,
                                        OutputWriter& w) {
  std::vector<RegionContext> contexts;
  std::vector<HexGrid> grids;
  std::vector<SampleEstimates> est;
  for (const RegionConfig* rc : regions) {
    const auto dir = w.root() / rc->name;
    try {
      contexts.push_back(detail::load_context(dir, cfg));
      grids.push_back(contexts.back().grid());
      persist::load_hex_attributes(dir, grids.back());
      est.push_back(persist::load_samples(dir, cfg.destination_classes(), cfg.access_method));
    } catch (const Error& e) {
      throw StageError(rc->name, Stage::aggregate, e.what());
    }
  }
  const AggregateResult res = aggregate_frames(cfg, contexts, grids, est);
  std::map<std::string, RegionGeometry> geoms;
  for (std::size_t i = 0; i < contexts.size(); ++i) {
    const std::filesystem::path dir = contexts[i].name;
    w.write(dir / (contexts[i].name + "_hex.csv"), frame_csv(res.hex[i]));
    w.write(dir / (contexts[i].name + "_hex.geojson"),
            hex_feature_collection(res.hex[i], grids[i], contexts[i].zone).dump() + "\n");
    geoms[contexts[i].name] = {contexts[i].core, contexts[i].zone};
  }
  w.write("all_cities.csv", frame_csv(res.city));
  w.write("all_cities.geojson", city_feature_collection(res.city, geoms).dump() + "\n");
  nlohmann::json diag;
  diag["pooled_z"] = res.pooled_z ? "computed" : "skipped: fewer than two hexes with sample points";
  diag["pooled_z_degenerate"] = res.degenerate;
  for (std::size_t i = 0; i < contexts.size(); ++i) diag["hexes"][contexts[i].name] = res.hex[i].rows.size();
  return diag;
}

// ---- validate ------------------------------------------------------------------

/// Official destination points by class. A feature's class comes from its
/// `destination_class` (or `class`) property, else `fallback`.
inline std::map<std::string, std::vector<Point>> read_official_destinations(const nlohmann::json& doc,
                                                                             const UtmZone& zone,
                                                                             const std::string& fallback) {
  std::map<std::string, std::vector<Point>> out;
  auto take = [&](const nlohmann::json& feature) {
    std::string cls = fallback;
    if (feature.contains("properties") && feature["properties"].is_object()) {
      const auto& p = feature["properties"];
      for (const char* k : {"destination_class", "class"})
        if (p.contains(k) && p[k].is_string()) {
          cls = p[k].get<std::string>();
          break;
        }
    }
    for (const Point& q : geojson::read_points(feature, zone)) out[cls].push_back(q);
  };
  if (doc.value("type", "") == "FeatureCollection") {
    for (const auto& f : doc.at("features")) take(f);
  } else {
    take(doc);
  }
  return out;
}

inline nlohmann::json validate_region(const ProjectConfig& cfg, const RegionConfig& rc, const RunOptions& opt,
                                      OutputWriter& w, RunManifest& manifest) {
  using json = nlohmann::json;
  const auto dir = w.root() / rc.name;
  const std::filesystem::path rel = rc.name;
  const RegionContext ctx = detail::load_context(dir, cfg);
  const BufferedRegion region = ctx.region();
  HexGrid grid = ctx.grid();
  persist::load_hex_attributes(dir, grid);
  const auto classes = cfg.destination_classes();
  const auto pois = persist::load_pois(dir, classes);
  json diag;

  std::optional<std::filesystem::path> edges_path = opt.official_edges;
  if (!edges_path && rc.official_edges) edges_path = cfg.resolve(*rc.official_edges);
  if (edges_path) {
    detail::record_input(manifest, *edges_path);
    const PedestrianGraph g = persist::load_graph(dir);
    std::vector<Polyline> osm_lines;
    for (const auto& e : g.edges()) osm_lines.push_back(e.geometry);
    const auto official = geojson::read_lines(geojson::read_file(*edges_path), ctx.zone);
    const OverlapReport rep = edge_overlap(osm_lines, official, opt.radii);
    csv::Row header{col::region, "osm_length_km", "official_length_km"};
    csv::Row row{ctx.name, csv::format_number(rep.total_len_osm / 1000.0),
                 csv::format_number(rep.total_len_official / 1000.0)};
    for (const auto& [r, pct] : rep.pct_official_within) {
      header.push_back("pct_official_within_" + format_distance(r) + "m");
      row.push_back(csv::format_number(pct));
    }
    w.write(rel / "validation_edges.csv", persist::csv_text({header, row}));
  }

  std::optional<std::filesystem::path> dests_path = opt.official_dests;
  if (!dests_path && rc.official_destinations) dests_path = cfg.resolve(*rc.official_destinations);
  if (dests_path) {
    detail::record_input(manifest, *dests_path);
    const auto official = read_official_destinations(geojson::read_file(*dests_path), ctx.zone, cfg.validation_class);
    // Compare inside the study region only; the hex frame is the tessellation over its extent.
    const HexGrid core_grid(region.extent(), cfg.hex_diagonal_m);
    std::vector<csv::Row> overlap{{col::region, "destination_class", "osm_count", "official_count",
                                   "buffer_m", "pct_osm_near_official", "pct_official_near_osm"}};
    std::vector<csv::Row> truth{{col::region, "destination_class", "hexes", "pct_true_condition",
                                 "avg_weight_osm_all", "avg_weight_official_all", "avg_weight_osm_true",
                                 "avg_weight_official_true"}};
    for (const auto& [cls, pts_all] : official) {
      std::vector<Point> off, mine;
      for (const Point& p : pts_all)
        if (region.contains_core(p)) off.push_back(p);
      for (const PoiSet& s : pois)
        if (s.destination_class == cls)
          for (const Poi& p : s.points)
            if (region.contains_core(p.location)) mine.push_back(p.location);
      const auto ov = destination_overlap(mine, off, opt.destination_radius);
      overlap.push_back({ctx.name, cls, std::to_string(mine.size()), std::to_string(off.size()),
                         csv::format_number(opt.destination_radius), detail::mean_text(ov.pct_a_near_b),
                         detail::mean_text(ov.pct_b_near_a)});
      const auto ht = hex_truth_stats(mine, off, core_grid);
      truth.push_back({ctx.name, cls, std::to_string(core_grid.size()), csv::format_number(ht.pct_true_condition),
                       csv::format_number(ht.avg_weight_osm_all), csv::format_number(ht.avg_weight_official_all),
                       csv::format_number(ht.avg_weight_osm_true), csv::format_number(ht.avg_weight_official_true)});
      if (!std::count_if(classes.begin(), classes.end(), [&](const std::string& c) { return c == cls; }))
        diag["unconfigured_official_classes"].push_back(cls);
    }
    w.write(rel / "validation_destinations.csv", persist::csv_text(overlap));
    w.write(rel / "validation_hex_truth.csv", persist::csv_text(truth));
  }

  // Ground-truth sampling frame for manual review.
  std::vector<GroundTruthCandidate> cands;
  for (const PoiSet& s : pois) {
    if (s.destination_class != cfg.validation_class) continue;
    for (const Poi& p : s.points) {
      if (!region.contains_core(p.location)) continue;
      const auto h = grid.locate(p.location);
      cands.push_back({p.source_id, s.destination_class, p.location, h ? grid[*h].pop_density : 0.0});
    }
  }
  std::vector<csv::Row> sheet{{"destination_id", "destination_class", "quintile", "pop_density", "longitude",
                               "latitude", "maps_view", "satellite_view", "street_view"}};
  if (cands.empty()) {
    diag["ground_truth"] = "no " + cfg.validation_class + " destinations inside the study region";
  } else {
    for (const auto& s : quintile_sample(cands, cfg.ground_truth_per_quintile, opt.seed)) {
      const LatLon ll = unproject(s.location, ctx.zone);
      sheet.push_back({s.destination_id, s.destination_class, std::to_string(s.quintile),
                       csv::format_number(s.density), csv::format_number(ll.lon), csv::format_number(ll.lat), "",
                       "", ""});
    }
    diag["ground_truth"] = {{"candidates", cands.size()}, {"sampled", sheet.size() - 1}};
  }
  w.write(rel / "ground_truth_sample.csv", persist::csv_text(sheet));

  if (opt.review) {
    detail::record_input(manifest, *opt.review);
    const VerdictTally t = tally_reviews(csv::read_file(opt.review->string()));
    std::vector<csv::Row> rows{{col::region, "destination_class", "reviewed", "verdict_true", "pct_true",
                                "street_unavailable", "pending"}};
    rows.push_back({ctx.name, "all", std::to_string(t.reviewed), std::to_string(t.verdict_true),
                    detail::mean_text(t.pct_true()), std::to_string(t.street_unavailable), std::to_string(t.pending)});
    for (const auto& [cls, tr] : t.by_class) {
      const auto pct = tr.second ? std::optional<double>(100.0 * static_cast<double>(tr.first) /
                                                         static_cast<double>(tr.second))
                                 : std::nullopt;
      rows.push_back({ctx.name, cls, std::to_string(tr.second), std::to_string(tr.first), detail::mean_text(pct), "",
                      ""});
    }
    w.write(rel / "ground_truth_tally.csv", persist::csv_text(rows));
  }
  return diag;
}

// ---- orchestration -------------------------------------------------------------

/// Runs the selected stages in workflow order and writes `manifest.json` last.
inline RunManifest run_pipeline(const ProjectConfig& cfg, const StageSet& stages, const RunOptions& opt = {}) {
  if (stages.empty()) throw ConfigError("no stages selected");
  std::vector<const RegionConfig*> regions;
  if (opt.regions.empty()) {
    for (const auto& r : cfg.regions) regions.push_back(&r);
  } else {
    for (const auto& name : opt.regions) regions.push_back(&cfg.region(name));
  }
  if (opt.review && regions.size() != 1) throw ConfigError("--review applies to a single region; pass --region");
  if (opt.radii.empty()) throw ConfigError("at least one validation radius is needed");
  const std::filesystem::path out = opt.out_dir.empty() ? cfg.resolve(cfg.output_dir) : opt.out_dir;
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw Error("cannot create output directory " + out.string() + ": " + ec.message());

  RunManifest manifest;
  manifest.config_sha256 = sha256_hex(serialize_config(cfg));
  OutputWriter w(out, manifest);

  auto per_region = [&](Stage stage, auto&& fn) {
    for (const RegionConfig* rc : regions) {
      RunManifest::StageRecord rec{to_string(stage), rc->name, utc_timestamp(), {}};
      try {
        manifest.diagnostics[rc->name][to_string(stage)] = fn(*rc);
      } catch (const StageError&) {
        throw;
      } catch (const std::exception& e) {
        throw StageError(rc->name, stage, e.what());
      }
      rec.finished = utc_timestamp();
      manifest.stages.push_back(rec);
    }
  };

  if (stages.count(Stage::ingest))
    per_region(Stage::ingest, [&](const RegionConfig& rc) { return ingest_region(cfg, rc, w, manifest); });
  if (stages.count(Stage::sample))
    per_region(Stage::sample, [&](const RegionConfig& rc) { return sample_region(cfg, rc, w, opt.threads); });
  if (stages.count(Stage::aggregate)) {
    RunManifest::StageRecord rec{"aggregate", "", utc_timestamp(), {}};
    try {
      manifest.diagnostics["aggregate"] = aggregate_regions(cfg, regions, w);
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError("", Stage::aggregate, e.what());
    }
    rec.finished = utc_timestamp();
    manifest.stages.push_back(rec);
  }
  if (stages.count(Stage::validate))
    per_region(Stage::validate, [&](const RegionConfig& rc) { return validate_region(cfg, rc, opt, w, manifest); });

  std::ofstream mf(out / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!mf) throw Error("cannot write " + (out / "manifest.json").string());
  mf << manifest.to_json().dump(2) << '\n';
  if (!mf) throw Error("write failed: " + (out / "manifest.json").string());
  return manifest;
}

}  // namespace pedaccess

#endif  // PEDACCESS_PIPELINE_STAGES_HPP

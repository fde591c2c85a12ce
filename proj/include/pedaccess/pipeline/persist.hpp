#ifndef PEDACCESS_PIPELINE_PERSIST_HPP
#define PEDACCESS_PIPELINE_PERSIST_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pedaccess/auxdata/csv.hpp"
#include "pedaccess/error.hpp"
#include "pedaccess/geometry/hexgrid.hpp"
#include "pedaccess/indicators/estimates.hpp"
#include "pedaccess/osm/pedestrian_graph.hpp"
#include "pedaccess/osm/pois.hpp"

// Stage intermediates. Numbers are written in shortest round-trip form, so a reload
// reproduces the in-memory values bit for bit.

namespace pedaccess::persist {

using json = nlohmann::json;

/// Thrown when a stage needs a file an earlier stage should have written.
class MissingUpstream : public Error {
 public:
  explicit MissingUpstream(const std::filesystem::path& p)
      : Error("missing upstream stage output: " + p.string()) {}
};

inline std::string num(double v) { return csv::format_number(v); }
inline std::string num(std::int64_t v) { return std::to_string(v); }

inline std::string csv_text(const std::vector<csv::Row>& rows) {
  std::ostringstream out;
  for (const auto& r : rows) csv::write_row(out, r);
  return out.str();
}

inline csv::Table read_upstream(const std::filesystem::path& p) {
  if (!std::filesystem::exists(p)) throw MissingUpstream(p);
  return csv::read_file(p.string());
}

inline json read_upstream_json(const std::filesystem::path& p) {
  if (!std::filesystem::exists(p)) throw MissingUpstream(p);
  std::ifstream in(p);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("malformed " + p.string() + ": " + e.what());
  }
}

namespace detail {

inline double get_double(const csv::Row& row, std::size_t i, const std::string& what) {
  const auto v = csv::to_double(csv::Table::field(row, i));
  if (!v) throw ParseError("bad number in " + what + ": '" + std::string(csv::Table::field(row, i)) + "'");
  return *v;
}

inline std::int64_t get_int(const csv::Row& row, std::size_t i, const std::string& what) {
  const auto v = csv::to_int(csv::Table::field(row, i));
  if (!v) throw ParseError("bad integer in " + what + ": '" + std::string(csv::Table::field(row, i)) + "'");
  return *v;
}

inline std::optional<double> get_optional(const csv::Row& row, std::size_t i, const std::string& what) {
  if (csv::Table::field(row, i).empty()) return std::nullopt;
  return get_double(row, i, what);
}

inline std::string encode_line(const std::vector<Point>& line) {
  std::string s;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (i) s += ';';
    s += num(line[i].x) + ' ' + num(line[i].y);
  }
  return s;
}

inline std::vector<Point> decode_line(std::string_view s, const std::string& what) {
  std::vector<Point> out;
  while (!s.empty()) {
    const auto semi = s.find(';');
    const std::string_view pair = s.substr(0, semi);
    const auto sp = pair.find(' ');
    const auto x = sp == std::string_view::npos ? std::nullopt : csv::to_double(pair.substr(0, sp));
    const auto y = sp == std::string_view::npos ? std::nullopt : csv::to_double(pair.substr(sp + 1));
    if (!x || !y) throw ParseError("bad geometry in " + what);
    out.push_back({*x, *y});
    if (semi == std::string_view::npos) break;
    s.remove_prefix(semi + 1);
  }
  return out;
}

}  // namespace detail

// ---- graph -------------------------------------------------------------------

inline std::string nodes_csv(const PedestrianGraph& g) {
  std::vector<csv::Row> rows{{"osm_id", "x", "y", "degree"}};
  for (std::uint32_t i = 0; i < g.node_count(); ++i) {
    const auto& n = g.node(i);
    rows.push_back({num(n.osm_id), num(n.position.x), num(n.position.y), num(std::int64_t{g.degree(i)})});
  }
  return csv_text(rows);
}

inline std::string edges_csv(const PedestrianGraph& g) {
  std::vector<csv::Row> rows{{"edge", "u", "v", "way_id", "length", "geometry"}};
  for (std::uint32_t k = 0; k < g.edge_count(); ++k) {
    const auto& e = g.edge(k);
    rows.push_back({num(std::int64_t{k}), num(g.node(e.u).osm_id), num(g.node(e.v).osm_id), num(e.way_id),
                    num(e.length), detail::encode_line(e.geometry)});
  }
  return csv_text(rows);
}

inline PedestrianGraph load_graph(const std::filesystem::path& dir) {
  const auto nt = read_upstream(dir / "nodes.csv");
  const auto et = read_upstream(dir / "edges.csv");
  const auto c_id = nt.require("osm_id"), c_x = nt.require("x"), c_y = nt.require("y");
  std::vector<GraphNode> nodes;
  std::unordered_map<std::int64_t, std::uint32_t> index;
  for (const auto& r : nt.rows()) {
    GraphNode n{detail::get_int(r, c_id, "nodes.csv"),
                {detail::get_double(r, c_x, "nodes.csv"), detail::get_double(r, c_y, "nodes.csv")}};
    index.emplace(n.osm_id, static_cast<std::uint32_t>(nodes.size()));
    nodes.push_back(n);
  }
  const auto c_u = et.require("u"), c_v = et.require("v"), c_w = et.require("way_id"), c_l = et.require("length"),
             c_g = et.require("geometry");
  std::vector<GraphEdge> edges;
  for (const auto& r : et.rows()) {
    auto node_of = [&](std::size_t c) {
      auto it = index.find(detail::get_int(r, c, "edges.csv"));
      if (it == index.end()) throw ParseError("edges.csv references an unknown node");
      return it->second;
    };
    edges.push_back({node_of(c_u), node_of(c_v), detail::get_double(r, c_l, "edges.csv"),
                     detail::decode_line(csv::Table::field(r, c_g), "edges.csv"), detail::get_int(r, c_w, "edges.csv")});
  }
  return PedestrianGraph(std::move(nodes), std::move(edges));
}

// ---- POIs ----------------------------------------------------------------------

inline std::string pois_csv(const std::vector<PoiSet>& sets) {
  std::vector<csv::Row> rows{{"destination_class", "source_id", "x", "y"}};
  for (const auto& s : sets)
    for (const auto& p : s.points) rows.push_back({s.destination_class, p.source_id, num(p.location.x), num(p.location.y)});
  return csv_text(rows);
}

/// One set per requested class, in the given order; classes without rows come back empty.
inline std::vector<PoiSet> load_pois(const std::filesystem::path& dir, const std::vector<std::string>& classes) {
  const auto t = read_upstream(dir / "pois.csv");
  const auto c_c = t.require("destination_class"), c_s = t.require("source_id"), c_x = t.require("x"),
             c_y = t.require("y");
  std::vector<PoiSet> out;
  std::map<std::string, std::size_t> at;
  for (const auto& c : classes) {
    at[c] = out.size();
    out.push_back({c, {}});
  }
  for (const auto& r : t.rows()) {
    auto it = at.find(std::string(csv::Table::field(r, c_c)));
    if (it == at.end()) continue;
    out[it->second].points.push_back(
        {std::string(csv::Table::field(r, c_s)), {detail::get_double(r, c_x, "pois.csv"), detail::get_double(r, c_y, "pois.csv")}, {}});
  }
  return out;
}

// ---- hexes -----------------------------------------------------------------------

inline std::string hexes_csv(const HexGrid& grid) {
  std::vector<csv::Row> rows{{"hex_id", "col", "row", "x", "y", "area_km2", "population", "pop_density",
                              "intersections", "intersection_density"}};
  for (const auto& c : grid.cells())
    rows.push_back({num(c.id), num(std::int64_t{c.col}), num(std::int64_t{c.row}), num(c.center.x), num(c.center.y),
                    num(c.area_km2), num(c.population), num(c.pop_density), num(c.intersection_count),
                    num(c.intersection_density)});
  return csv_text(rows);
}

/// Fills population and intersection counts of a freshly tessellated grid from hexes.csv.
inline void load_hex_attributes(const std::filesystem::path& dir, HexGrid& grid) {
  const auto t = read_upstream(dir / "hexes.csv");
  if (t.rows().size() != grid.size()) throw ParseError("hexes.csv does not match the region's hex grid");
  const auto c_id = t.require("hex_id"), c_col = t.require("col"), c_row = t.require("row"),
             c_pop = t.require("population"), c_int = t.require("intersections");
  for (const auto& r : t.rows()) {
    const auto id = detail::get_int(r, c_id, "hexes.csv");
    if (id < 0 || static_cast<std::size_t>(id) >= grid.size()) throw ParseError("hexes.csv has an unknown hex id");
    HexCell& cell = grid[id];
    if (cell.col != detail::get_int(r, c_col, "hexes.csv") || cell.row != detail::get_int(r, c_row, "hexes.csv"))
      throw ParseError("hexes.csv does not match the region's hex grid");
    cell.set_population(detail::get_double(r, c_pop, "hexes.csv"));
    cell.set_intersections(detail::get_int(r, c_int, "hexes.csv"));
  }
}

inline std::string intersections_csv(const std::vector<Point>& pts, const std::vector<std::int64_t>& hex) {
  std::vector<csv::Row> rows{{"id", "x", "y", "hex_id"}};
  for (std::size_t i = 0; i < pts.size(); ++i)
    rows.push_back({num(static_cast<std::int64_t>(i)), num(pts[i].x), num(pts[i].y), num(hex[i])});
  return csv_text(rows);
}

// ---- sample estimates --------------------------------------------------------------

inline std::vector<std::string> sample_columns(const std::vector<std::string>& classes, AccessMethod method) {
  std::vector<std::string> cols{"id", "x", "y", "hex_id", "edge", "n1", "n2", "l1", "l2", "nh_pop_density",
                                "nh_intersection_density"};
  for (const auto& c : classes) {
    cols.push_back("dist_" + c);
    cols.push_back("access_" + c + "_binary");
    if (method != AccessMethod::binary) cols.push_back("access_" + c + "_" + to_string(method));
  }
  for (const char* c : {"daily_living", "z_nh_pop_density", "z_nh_intersection_density", "z_daily_living",
                        "walkability"})
    cols.push_back(c);
  return cols;
}

inline std::string samples_csv(const SampleEstimates& est) {
  std::vector<csv::Row> rows{sample_columns(est.classes, est.method)};
  const bool two = est.method != AccessMethod::binary;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const auto& sp = est.points[i];
    csv::Row r{num(sp.id), num(sp.location.x), num(sp.location.y), num(sp.hex_id), num(std::int64_t{sp.edge}),
               num(sp.n1), num(sp.n2), num(sp.l1), num(sp.l2), num(est.nh_pop_density[i]),
               num(est.nh_intersection_density[i])};
    for (std::size_t c = 0; c < est.classes.size(); ++c) {
      r.push_back(est.distance[c][i] ? num(*est.distance[c][i]) : std::string());
      r.push_back(num(est.binary[c][i]));
      if (two) r.push_back(num(est.score[c][i]));
    }
    for (double v : {est.daily_living[i], est.z_pop[i], est.z_int[i], est.z_daily[i], est.walkability[i]})
      r.push_back(num(v));
    rows.push_back(std::move(r));
  }
  return csv_text(rows);
}

inline SampleEstimates load_samples(const std::filesystem::path& dir, const std::vector<std::string>& classes,
                                    AccessMethod method) {
  const auto path = dir / "samples.csv";
  const auto t = read_upstream(path);
  const auto expected = sample_columns(classes, method);
  if (t.header() != expected)
    throw Error("samples.csv columns do not match the configured classes and access method; rerun the sample stage");
  SampleEstimates est;
  est.classes = classes;
  est.method = method;
  const bool two = method != AccessMethod::binary;
  const std::size_t nc = classes.size();
  est.distance.assign(nc, {});
  est.binary.assign(nc, {});
  est.score.assign(nc, {});
  const std::string what = path.string();
  for (const auto& r : t.rows()) {
    std::size_t k = 0;
    SamplePoint sp;
    sp.id = detail::get_int(r, k++, what);
    sp.location.x = detail::get_double(r, k++, what);
    sp.location.y = detail::get_double(r, k++, what);
    sp.hex_id = detail::get_int(r, k++, what);
    sp.edge = static_cast<std::uint32_t>(detail::get_int(r, k++, what));
    sp.n1 = detail::get_int(r, k++, what);
    sp.n2 = detail::get_int(r, k++, what);
    sp.l1 = detail::get_double(r, k++, what);
    sp.l2 = detail::get_double(r, k++, what);
    est.points.push_back(sp);
    est.nh_pop_density.push_back(detail::get_double(r, k++, what));
    est.nh_intersection_density.push_back(detail::get_double(r, k++, what));
    for (std::size_t c = 0; c < nc; ++c) {
      est.distance[c].push_back(detail::get_optional(r, k++, what));
      est.binary[c].push_back(detail::get_double(r, k++, what));
      est.score[c].push_back(two ? detail::get_double(r, k++, what) : est.binary[c].back());
    }
    est.daily_living.push_back(detail::get_double(r, k++, what));
    est.z_pop.push_back(detail::get_double(r, k++, what));
    est.z_int.push_back(detail::get_double(r, k++, what));
    est.z_daily.push_back(detail::get_double(r, k++, what));
    est.walkability.push_back(detail::get_double(r, k++, what));
  }
  return est;
}

}  // namespace pedaccess::persist

#endif  // PEDACCESS_PIPELINE_PERSIST_HPP

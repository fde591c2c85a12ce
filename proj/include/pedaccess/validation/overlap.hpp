#ifndef PEDACCESS_VALIDATION_OVERLAP_HPP
#define PEDACCESS_VALIDATION_OVERLAP_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "pedaccess/error.hpp"
#include "pedaccess/geometry/grid_index.hpp"
#include "pedaccess/geometry/hexgrid.hpp"
#include "pedaccess/geometry/point.hpp"

namespace pedaccess {

using Polyline = std::vector<Point>;

struct OverlapReport {
  double total_len_osm = 0.0;
  double total_len_official = 0.0;
  std::map<double, double> pct_official_within;  // radius → percent of official length
};

/// Share of official edge length lying within each radius of an OSM edge. Each official
/// polyline is cut into equal pieces no longer than `step`; a piece counts by its midpoint.
inline OverlapReport edge_overlap(const std::vector<Polyline>& osm, const std::vector<Polyline>& official,
                                  const std::vector<double>& radii, double step = 1.0) {
  if (!(step > 0)) throw Error("edge overlap step must be positive");
  if (radii.empty()) throw Error("edge overlap needs at least one radius");
  for (double r : radii)
    if (!(r >= 0)) throw Error("edge overlap radius must be non-negative");
  OverlapReport rep;
  for (const auto& l : osm) rep.total_len_osm += polyline_length(l);
  for (const auto& l : official) rep.total_len_official += polyline_length(l);
  if (!(rep.total_len_official > 0)) throw Error("official edge layer is empty");

  const double rmax = *std::max_element(radii.begin(), radii.end());
  GridIndex<Segment> idx(std::max(rmax, 10.0));
  for (const auto& l : osm)
    for (std::size_t i = 1; i < l.size(); ++i)
      if (l[i - 1] != l[i]) idx.insert(Segment{l[i - 1], l[i]});

  std::vector<double> sorted = radii;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> within(sorted.size(), 0.0);
  for (const auto& l : official)
    for (std::size_t i = 1; i < l.size(); ++i) {
      const Point a = l[i - 1], b = l[i];
      const double len = distance(a, b);
      if (len == 0) continue;
      const auto pieces = static_cast<std::size_t>(std::ceil(len / step));
      const double w = len / static_cast<double>(pieces);
      for (std::size_t k = 0; k < pieces; ++k) {
        const Point m = a + ((static_cast<double>(k) + 0.5) / static_cast<double>(pieces)) * (b - a);
        const auto d = nearest_distance(idx, m, rmax);
        if (!d) continue;
        for (std::size_t r = 0; r < sorted.size(); ++r)
          if (*d <= sorted[r]) within[r] += w;
      }
    }
  for (std::size_t r = 0; r < sorted.size(); ++r)
    rep.pct_official_within[sorted[r]] = std::min(100.0, 100.0 * within[r] / rep.total_len_official);
  return rep;
}

struct DestinationOverlap {
  std::optional<double> pct_a_near_b;  // nullopt when A is empty
  std::optional<double> pct_b_near_a;
};

/// Buffers of radius r around each point intersect when centers are at most 2r apart.
inline DestinationOverlap destination_overlap(const std::vector<Point>& a, const std::vector<Point>& b, double radius) {
  if (!(radius >= 0)) throw Error("destination overlap radius must be non-negative");
  const double reach = 2.0 * radius;
  auto share = [&](const std::vector<Point>& from, const std::vector<Point>& to) -> std::optional<double> {
    if (from.empty()) return std::nullopt;
    if (to.empty()) return 0.0;
    const GridIndex<Point> idx(std::max(reach, 10.0), to);
    std::size_t hit = 0;
    for (const Point& p : from)
      if (nearest_within(idx, p, reach)) ++hit;
    return 100.0 * static_cast<double>(hit) / static_cast<double>(from.size());
  };
  return {share(a, b), share(b, a)};
}

struct HexTruthRow {
  std::int64_t hex_id = 0;
  std::size_t osm = 0, official = 0;
  bool true_condition = true;
  double w_osm = 0.0, w_official = 0.0;  // fractions in [0, 1]
};

struct HexTruthReport {
  std::vector<HexTruthRow> hexes;
  double pct_true_condition = 0.0;
  double avg_weight_osm_all = 0.0;  // percentages
  double avg_weight_official_all = 0.0;
  double avg_weight_osm_true = 0.0;
  double avg_weight_official_true = 0.0;
  std::size_t outside_grid = 0;
};

/// True condition per hex (both sets present, or both absent) and count-share weights,
/// summarized over all hexes and over true-condition hexes.
inline HexTruthReport hex_truth_stats(const std::vector<Point>& osm, const std::vector<Point>& official,
                                      const HexGrid& grid) {
  HexTruthReport rep;
  rep.hexes.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) rep.hexes[i].hex_id = static_cast<std::int64_t>(i);
  for (const Point& p : osm) {
    if (auto id = grid.locate(p))
      ++rep.hexes[*id].osm;
    else
      ++rep.outside_grid;
  }
  for (const Point& p : official) {
    if (auto id = grid.locate(p))
      ++rep.hexes[*id].official;
    else
      ++rep.outside_grid;
  }
  if (rep.hexes.empty()) return rep;
  std::size_t n_true = 0;
  double sum_o = 0, sum_f = 0, sum_ot = 0, sum_ft = 0;
  for (HexTruthRow& h : rep.hexes) {
    h.true_condition = (h.osm > 0) == (h.official > 0);
    const std::size_t total = h.osm + h.official;
    if (total > 0) {
      h.w_osm = static_cast<double>(h.osm) / static_cast<double>(total);
      h.w_official = static_cast<double>(h.official) / static_cast<double>(total);
    }
    sum_o += h.w_osm;
    sum_f += h.w_official;
    if (h.true_condition) {
      ++n_true;
      sum_ot += h.w_osm;
      sum_ft += h.w_official;
    }
  }
  const double n = static_cast<double>(rep.hexes.size());
  rep.pct_true_condition = 100.0 * static_cast<double>(n_true) / n;
  rep.avg_weight_osm_all = 100.0 * sum_o / n;
  rep.avg_weight_official_all = 100.0 * sum_f / n;
  if (n_true > 0) {
    rep.avg_weight_osm_true = 100.0 * sum_ot / static_cast<double>(n_true);
    rep.avg_weight_official_true = 100.0 * sum_ft / static_cast<double>(n_true);
  }
  return rep;
}

}  // namespace pedaccess

#endif  // PEDACCESS_VALIDATION_OVERLAP_HPP

#ifndef PEDACCESS_INDICATORS_SAMPLE_POINTS_HPP
#define PEDACCESS_INDICATORS_SAMPLE_POINTS_HPP

#include <cstdint>
#include <vector>

#include "pedaccess/error.hpp"
#include "pedaccess/geometry/boundary.hpp"
#include "pedaccess/geometry/hexgrid.hpp"
#include "pedaccess/osm/pedestrian_graph.hpp"

namespace pedaccess {

struct SamplePoint {
  std::int64_t id = 0;
  Point location;
  std::uint32_t edge = 0;
  std::int64_t n1 = 0;  // OSM id of the edge's first terminal node
  std::int64_t n2 = 0;  // OSM id of the second; equal to n1 on a loop
  double l1 = 0.0;      // meters along the edge to n1
  double l2 = 0.0;      // meters along the edge to n2
  std::int64_t hex_id = -1;
};

/// Points every `interval` meters of arc length along each edge, starting at its first
/// node. A point at a node already emitted by a lower-numbered edge is skipped.
inline std::vector<SamplePoint> generate_sample_points(const PedestrianGraph& g, double interval) {
  if (!(interval > 0)) throw Error("sample interval must be positive");
  std::vector<SamplePoint> out;
  std::vector<char> node_done(g.node_count(), 0);
  for (std::uint32_t k = 0; k < g.edge_count(); ++k) {
    const GraphEdge& e = g.edge(k);
    const double L = e.length;
    const auto& line = e.geometry;
    std::size_t seg = 1;
    double seg_start = 0.0;
    for (std::int64_t step = 0;; ++step) {
      const double offset = static_cast<double>(step) * interval;
      if (offset >= L) break;
      Point p;
      if (step == 0) {
        if (node_done[e.u]) continue;
        node_done[e.u] = 1;
        p = g.node(e.u).position;
      } else {
        while (seg + 1 < line.size() && seg_start + distance(line[seg - 1], line[seg]) < offset) {
          seg_start += distance(line[seg - 1], line[seg]);
          ++seg;
        }
        const double len = distance(line[seg - 1], line[seg]);
        const double t = len > 0 ? std::min((offset - seg_start) / len, 1.0) : 0.0;
        p = line[seg - 1] + t * (line[seg] - line[seg - 1]);
      }
      SamplePoint sp;
      sp.id = static_cast<std::int64_t>(out.size());
      sp.location = p;
      sp.edge = k;
      sp.n1 = g.node(e.u).osm_id;
      sp.n2 = g.node(e.v).osm_id;
      sp.l1 = offset;
      sp.l2 = L - offset;
      out.push_back(sp);
    }
  }
  return out;
}

/// Sets hex_id by containment (-1 outside the grid).
inline void assign_hexes(std::vector<SamplePoint>& points, const HexGrid& grid) {
  for (SamplePoint& sp : points) {
    const auto id = grid.locate(sp.location);
    sp.hex_id = id ? *id : -1;
  }
}

/// Keeps points lying inside the (unbuffered) study region.
inline std::vector<SamplePoint> restrict_to_region(const std::vector<SamplePoint>& points,
                                                   const BufferedRegion& region) {
  std::vector<SamplePoint> out;
  for (const SamplePoint& sp : points)
    if (region.contains_core(sp.location)) out.push_back(sp);
  return out;
}

/// Keeps points whose hex has an estimated population of at least `threshold`.
inline std::vector<SamplePoint> filter_sample_points(const std::vector<SamplePoint>& points, const HexGrid& grid,
                                                     double threshold) {
  std::vector<SamplePoint> out;
  for (const SamplePoint& sp : points) {
    if (sp.hex_id < 0 || static_cast<std::size_t>(sp.hex_id) >= grid.size()) {
      if (threshold <= 0) out.push_back(sp);
      continue;
    }
    if (grid[sp.hex_id].population >= threshold) out.push_back(sp);
  }
  return out;
}

}  // namespace pedaccess

#endif  // PEDACCESS_INDICATORS_SAMPLE_POINTS_HPP

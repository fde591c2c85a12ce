#ifndef PEDACCESS_NETWORK_ACCESSIBILITY_HPP
#define PEDACCESS_NETWORK_ACCESSIBILITY_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pedaccess/error.hpp"
#include "pedaccess/geometry/grid_index.hpp"
#include "pedaccess/geometry/hexgrid.hpp"
#include "pedaccess/network/parallel.hpp"
#include "pedaccess/network/shortest_paths.hpp"
#include "pedaccess/osm/pedestrian_graph.hpp"
#include "pedaccess/osm/pois.hpp"

namespace pedaccess {

/// Distance from each node to its nearest destination of one class; nullopt = unreached.
struct NodeDistanceField {
  std::string destination_class;
  double cutoff = 0.0;
  std::vector<std::optional<double>> distance;  // by node index
  std::vector<std::uint32_t> snapped_nodes;     // sorted, unique
  std::size_t pois_snapped = 0;
  std::size_t pois_dropped = 0;
};

/// Snaps points to graph nodes by straight-line distance.
class NodeSnapper {
 public:
  NodeSnapper(const PedestrianGraph& g, double snap_max)
      : snap_max_(snap_max), index_(std::max(snap_max / 4.0, 25.0)) {
    if (!(snap_max >= 0)) throw Error("snap distance must be non-negative");
    for (const GraphNode& n : g.nodes()) index_.insert(n.position);
  }
  /// Nearest node within snap_max; ties go to the lower node index.
  std::optional<std::uint32_t> snap(Point p) const {
    auto nb = nearest_within(index_, p, snap_max_);
    if (!nb) return std::nullopt;
    return static_cast<std::uint32_t>(nb->id);
  }

 private:
  double snap_max_;
  GridIndex<Point> index_;
};

/// Multi-source bounded search from every snapped destination of the set.
inline NodeDistanceField nearest_destination_field(const PedestrianGraph& g, const NodeSnapper& snapper,
                                                   const PoiSet& pois, double cutoff) {
  if (g.empty()) throw Error("nearest_destination_field needs a non-empty graph");
  NodeDistanceField f;
  f.destination_class = pois.destination_class;
  f.cutoff = cutoff;
  f.distance.assign(g.node_count(), std::nullopt);
  for (const Poi& p : pois.points) {
    if (auto n = snapper.snap(p.location)) {
      f.snapped_nodes.push_back(*n);
      ++f.pois_snapped;
    } else {
      ++f.pois_dropped;
    }
  }
  std::sort(f.snapped_nodes.begin(), f.snapped_nodes.end());
  f.snapped_nodes.erase(std::unique(f.snapped_nodes.begin(), f.snapped_nodes.end()), f.snapped_nodes.end());
  if (f.snapped_nodes.empty()) return f;
  std::vector<std::pair<std::uint32_t, double>> sources;
  for (std::uint32_t n : f.snapped_nodes) sources.emplace_back(n, 0.0);
  BoundedDijkstra dj(g);
  for (const auto& [v, d] : dj.run(sources, cutoff)) f.distance[v] = d;
  return f;
}

inline NodeDistanceField nearest_destination_field(const PedestrianGraph& g, const PoiSet& pois, double snap_max,
                                                   double cutoff) {
  return nearest_destination_field(g, NodeSnapper(g, snap_max), pois, cutoff);
}

/// Hex id of each node by containment; throws if a node lies outside the grid.
inline std::vector<std::int64_t> assign_nodes_to_hexes(const PedestrianGraph& g, const HexGrid& grid) {
  std::vector<std::int64_t> out(g.node_count());
  for (std::uint32_t i = 0; i < g.node_count(); ++i) {
    const auto id = grid.locate(g.node(i).position);
    if (!id) throw Error("graph node " + std::to_string(g.node(i).osm_id) + " lies outside the hex grid");
    out[i] = *id;
  }
  return out;
}

/// Per node: sorted hex ids reached within `cutoff` meters, always including its own hex.
inline std::vector<std::vector<std::int64_t>> node_catchments(const PedestrianGraph& g,
                                                              const std::vector<std::int64_t>& node_hex,
                                                              double cutoff, unsigned threads = 1) {
  if (node_hex.size() != g.node_count()) throw Error("node hex assignment does not cover the graph");
  std::vector<std::vector<std::int64_t>> out(g.node_count());
  parallel_ranges(g.node_count(), threads, [&](std::size_t begin, std::size_t end, unsigned) {
    BoundedDijkstra dj(g);
    for (std::size_t n = begin; n < end; ++n) {
      auto& hexes = out[n];
      hexes.push_back(node_hex[n]);
      for (const auto& [v, d] : dj.run(static_cast<std::uint32_t>(n), cutoff)) hexes.push_back(node_hex[v]);
      std::sort(hexes.begin(), hexes.end());
      hexes.erase(std::unique(hexes.begin(), hexes.end()), hexes.end());
    }
  });
  return out;
}

struct LocalDensity {
  double pop_density = 0.0;
  double intersection_density = 0.0;
};

/// Unweighted mean of catchment hex densities for each node.
inline std::vector<LocalDensity> node_local_density(const std::vector<std::vector<std::int64_t>>& catchments,
                                                    const HexGrid& grid) {
  std::vector<LocalDensity> out(catchments.size());
  for (std::size_t n = 0; n < catchments.size(); ++n) {
    const auto& hexes = catchments[n];
    if (hexes.empty()) throw Error("empty catchment for node " + std::to_string(n));
    double pop = 0, inter = 0;
    for (std::int64_t h : hexes) {
      if (h < 0 || static_cast<std::size_t>(h) >= grid.size()) throw Error("catchment hex id " + std::to_string(h) + " missing");
      pop += grid[h].pop_density;
      inter += grid[h].intersection_density;
    }
    const double k = static_cast<double>(hexes.size());
    out[n] = {pop / k, inter / k};
  }
  return out;
}

}  // namespace pedaccess

#endif  // PEDACCESS_NETWORK_ACCESSIBILITY_HPP

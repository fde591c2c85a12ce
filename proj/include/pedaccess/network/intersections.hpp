#ifndef PEDACCESS_NETWORK_INTERSECTIONS_HPP
#define PEDACCESS_NETWORK_INTERSECTIONS_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "pedaccess/error.hpp"
#include "pedaccess/geometry/grid_index.hpp"
#include "pedaccess/geometry/hexgrid.hpp"
#include "pedaccess/osm/pedestrian_graph.hpp"

namespace pedaccess {

struct IntersectionSet {
  std::vector<Point> points;
  std::vector<std::vector<std::uint32_t>> members;  // graph nodes merged into each point
  std::vector<std::int64_t> hex_counts;             // by hex id, once assigned
  std::size_t candidate_nodes = 0;
  std::size_t outside_grid = 0;
};

namespace detail {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace detail

/// Merges degree ≥ 3 nodes lying within `tolerance` of each other (transitively) into
/// their centroid. Merging repeats on the centroids until no two output points are
/// within tolerance. Points are ordered by their lowest member node.
inline IntersectionSet consolidate_intersections(const PedestrianGraph& g, double tolerance) {
  if (!(tolerance > 0)) throw Error("intersection tolerance must be positive");
  IntersectionSet out;
  for (std::uint32_t i = 0; i < g.node_count(); ++i)
    if (g.degree(i) >= 3) out.members.push_back({i});
  out.candidate_nodes = out.members.size();
  for (const auto& m : out.members) out.points.push_back(g.node(m.front()).position);

  for (;;) {
    const std::size_t n = out.points.size();
    GridIndex<Point> idx(tolerance, out.points);
    detail::DisjointSets sets(n);
    bool merged = false;
    for (std::size_t i = 0; i < n; ++i)
      for (const Neighbor& nb : idx.within(out.points[i], tolerance))
        if (nb.id > i) {
          sets.unite(i, nb.id);
          merged = true;
        }
    if (!merged) break;
    std::vector<std::vector<std::uint32_t>> groups(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto& dst = groups[sets.find(i)];
      dst.insert(dst.end(), out.members[i].begin(), out.members[i].end());
    }
    out.members.clear();
    out.points.clear();
    for (auto& grp : groups) {
      if (grp.empty()) continue;
      std::sort(grp.begin(), grp.end());
      Point c{0, 0};
      for (std::uint32_t v : grp) c = c + g.node(v).position;
      out.points.push_back((1.0 / static_cast<double>(grp.size())) * c);
      out.members.push_back(std::move(grp));
    }
  }
  return out;
}

/// Counts intersections per hex and stores counts and densities on the grid cells.
inline void assign_intersections(IntersectionSet& set, HexGrid& grid) {
  set.hex_counts.assign(grid.size(), 0);
  set.outside_grid = 0;
  for (const Point& p : set.points) {
    if (auto id = grid.locate(p))
      ++set.hex_counts[static_cast<std::size_t>(*id)];
    else
      ++set.outside_grid;
  }
  for (HexCell& c : grid.cells()) c.set_intersections(set.hex_counts[static_cast<std::size_t>(c.id)]);
}

}  // namespace pedaccess

#endif  // PEDACCESS_NETWORK_INTERSECTIONS_HPP

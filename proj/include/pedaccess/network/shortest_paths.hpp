#ifndef PEDACCESS_NETWORK_SHORTEST_PATHS_HPP
#define PEDACCESS_NETWORK_SHORTEST_PATHS_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "pedaccess/error.hpp"
#include "pedaccess/osm/pedestrian_graph.hpp"

namespace pedaccess {

/// (node, meters) pairs ordered by node index.
using DistanceMap = std::vector<std::pair<std::uint32_t, double>>;

/// Dijkstra truncated at a cutoff, with reusable scratch space. Equal keys pop in node
/// order so settled order and results are reproducible.
class BoundedDijkstra {
 public:
  explicit BoundedDijkstra(const PedestrianGraph& g)
      : g_(g), dist_(g.node_count(), kInf), settled_(g.node_count(), 0) {}

  /// Runs from one or more zero-distance (or offset) sources.
  DistanceMap run(const std::vector<std::pair<std::uint32_t, double>>& sources, double cutoff) {
    if (!(cutoff >= 0)) throw Error("cutoff must be non-negative");
    reset();
    Queue pq;
    for (const auto& [s, d0] : sources) {
      if (s >= g_.node_count()) throw Error("unknown source node");
      if (d0 <= cutoff && d0 < dist_[s]) {
        if (dist_[s] == kInf) touched_.push_back(s);
        dist_[s] = d0;
        pq.emplace(d0, s);
      }
    }
    DistanceMap out;
    while (!pq.empty()) {
      const auto [d, u] = pq.top();
      pq.pop();
      if (settled_[u] || d > dist_[u]) continue;
      settled_[u] = 1;
      out.emplace_back(u, d);
      for (const Arc& a : g_.arcs(u)) {
        const double nd = d + a.length;
        if (nd > cutoff || nd >= dist_[a.to]) continue;
        if (dist_[a.to] == kInf) touched_.push_back(a.to);
        dist_[a.to] = nd;
        pq.emplace(nd, a.to);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  DistanceMap run(std::uint32_t source, double cutoff) { return run({{source, 0.0}}, cutoff); }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  using Entry = std::pair<double, std::uint32_t>;
  using Queue = std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>>;

  void reset() {
    for (std::uint32_t v : touched_) {
      dist_[v] = kInf;
      settled_[v] = 0;
    }
    touched_.clear();
  }

  const PedestrianGraph& g_;
  std::vector<double> dist_;
  std::vector<char> settled_;
  std::vector<std::uint32_t> touched_;
};

/// Exact network distances from `source` to every node within `cutoff` meters.
inline DistanceMap bounded_sssp(const PedestrianGraph& g, std::uint32_t source, double cutoff) {
  if (source >= g.node_count()) throw Error("unknown source node " + std::to_string(source));
  BoundedDijkstra d(g);
  return d.run(source, cutoff);
}

}  // namespace pedaccess

#endif  // PEDACCESS_NETWORK_SHORTEST_PATHS_HPP

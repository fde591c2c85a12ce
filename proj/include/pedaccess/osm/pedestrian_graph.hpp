#ifndef PEDACCESS_OSM_PEDESTRIAN_GRAPH_HPP
#define PEDACCESS_OSM_PEDESTRIAN_GRAPH_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "pedaccess/error.hpp"
#include "pedaccess/geometry/boundary.hpp"
#include "pedaccess/geometry/projection.hpp"
#include "pedaccess/osm/elements.hpp"

namespace pedaccess {

struct GraphNode {
  std::int64_t osm_id = 0;
  Point position;
};

struct GraphEdge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  double length = 0.0;
  std::vector<Point> geometry;  // u's position first, v's last
  std::int64_t way_id = 0;
};

struct Arc {
  std::uint32_t to;
  std::uint32_t edge;
  double length;
};

/// Undirected pedestrian network. Node indices are dense and ordered by OSM id.
class PedestrianGraph {
 public:
  PedestrianGraph() = default;

  PedestrianGraph(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges)
      : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!index_.emplace(nodes_[i].osm_id, static_cast<std::uint32_t>(i)).second)
        throw Error("duplicate graph node id " + std::to_string(nodes_[i].osm_id));
    }
    degree_.assign(nodes_.size(), 0);
    std::vector<std::uint32_t> count(nodes_.size() + 1, 0);
    for (const GraphEdge& e : edges_) {
      if (e.u >= nodes_.size() || e.v >= nodes_.size()) throw Error("graph edge references a missing node");
      if (!(e.length > 0)) throw Error("graph edge with non-positive length");
      ++degree_[e.u];
      ++degree_[e.v];
      ++count[e.u + 1];
      if (e.u != e.v) ++count[e.v + 1];
    }
    for (std::size_t i = 1; i < count.size(); ++i) count[i] += count[i - 1];
    offsets_ = count;
    arcs_.resize(offsets_.back());
    std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::uint32_t k = 0; k < edges_.size(); ++k) {
      const GraphEdge& e = edges_[k];
      arcs_[fill[e.u]++] = {e.v, k, e.length};
      if (e.u != e.v) arcs_[fill[e.v]++] = {e.u, k, e.length};
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      std::sort(arcs_.begin() + offsets_[i], arcs_.begin() + offsets_[i + 1],
                [](const Arc& a, const Arc& b) { return a.to != b.to ? a.to < b.to : a.edge < b.edge; });
  }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return nodes_.empty(); }
  const std::vector<GraphNode>& nodes() const { return nodes_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  const GraphNode& node(std::uint32_t i) const { return nodes_[i]; }
  const GraphEdge& edge(std::uint32_t i) const { return edges_[i]; }

  std::span<const Arc> arcs(std::uint32_t node) const {
    return {arcs_.data() + offsets_[node], arcs_.data() + offsets_[node + 1]};
  }

  /// Incident edge ends; a loop counts twice.
  std::uint32_t degree(std::uint32_t node) const { return degree_[node]; }

  std::optional<std::uint32_t> find_node(std::int64_t osm_id) const {
    auto it = index_.find(osm_id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  double total_length() const {
    double t = 0;
    for (const GraphEdge& e : edges_) t += e.length;
    return t;
  }

 private:
  std::vector<GraphNode> nodes_;
  std::vector<GraphEdge> edges_;
  std::vector<std::uint32_t> offsets_{0};
  std::vector<Arc> arcs_;
  std::vector<std::uint32_t> degree_;
  std::unordered_map<std::int64_t, std::uint32_t> index_;
};

/// Walkable-way rule: any `highway` except motorways, and not foot=no or access=private.
inline bool is_pedestrian_way(const osm::Tags& tags) {
  const auto hw = osm::tag(tags, "highway");
  if (!hw) return false;
  if (*hw == "motorway" || *hw == "motorway_link") return false;
  if (osm::tag(tags, "foot") == "no") return false;
  if (osm::tag(tags, "access") == "private") return false;
  return true;
}

struct GraphBuildStats {
  std::size_t ways_used = 0;
  std::size_t stubs_dropped = 0;
  std::size_t zero_length_dropped = 0;
};

/// Builds the walkable network inside the buffered region.
///
/// Ways are cut to runs of consecutive in-region nodes, then split wherever a node is
/// shared by several runs (or repeated within one), so edges meet only at graph nodes.
/// Clipped ends that leave a stub shorter than 1 m are dropped. An empty result is an
/// error unless `allow_empty` is set.
inline PedestrianGraph build_pedestrian_graph(const osm::Data& data, const BufferedRegion& region, const UtmZone& zone,
                                              GraphBuildStats* stats = nullptr, bool allow_empty = false) {
  GraphBuildStats local;
  GraphBuildStats& st = stats ? *stats : local;

  struct Run {
    std::int64_t way_id;
    std::vector<std::int64_t> refs;
    bool clipped_front;
    bool clipped_back;
  };
  std::vector<Run> runs;
  std::unordered_map<std::int64_t, Point> pos;
  std::unordered_map<std::int64_t, bool> inside;

  auto node_inside = [&](std::int64_t id) {
    auto it = inside.find(id);
    if (it != inside.end()) return it->second;
    const Point p = project(data.locations.at(id).latlon(), zone);
    pos.emplace(id, p);
    const bool in = region.contains(p);
    inside.emplace(id, in);
    return in;
  };

  for (const osm::Way& w : data.ways) {  // sorted by id
    if (!is_pedestrian_way(w.tags)) continue;
    ++st.ways_used;
    Run cur{w.id, {}, false, false};
    bool prev_in = false;
    for (std::size_t i = 0; i < w.refs.size(); ++i) {
      const std::int64_t id = w.refs[i];
      const bool in = node_inside(id);
      if (in) {
        if (cur.refs.empty()) cur.clipped_front = i > 0;
        if (cur.refs.empty() || cur.refs.back() != id) cur.refs.push_back(id);
      } else if (prev_in) {
        cur.clipped_back = true;
        if (cur.refs.size() >= 2) runs.push_back(std::move(cur));
        cur = Run{w.id, {}, false, false};
      }
      prev_in = in;
    }
    if (cur.refs.size() >= 2) runs.push_back(std::move(cur));
  }

  std::unordered_map<std::int64_t, int> usage;
  std::unordered_map<std::int64_t, bool> is_endpoint;
  std::unordered_map<std::int64_t, bool> clip_end;
  for (const Run& r : runs) {
    for (std::int64_t id : r.refs) ++usage[id];
    is_endpoint[r.refs.front()] = true;
    is_endpoint[r.refs.back()] = true;
    if (r.clipped_front) clip_end[r.refs.front()] = true;
    if (r.clipped_back) clip_end[r.refs.back()] = true;
  }
  auto is_graph_node = [&](std::int64_t id) { return is_endpoint.contains(id) || usage[id] >= 2; };

  struct RawEdge {
    std::int64_t u, v;
    std::vector<Point> geom;
    double length;
    std::int64_t way_id;
  };
  std::vector<RawEdge> raw;
  for (const Run& r : runs) {
    std::size_t start = 0;
    for (std::size_t i = 1; i < r.refs.size(); ++i) {
      if (!is_graph_node(r.refs[i])) continue;
      RawEdge e{r.refs[start], r.refs[i], {}, 0.0, r.way_id};
      for (std::size_t k = start; k <= i; ++k) e.geom.push_back(pos.at(r.refs[k]));
      e.length = polyline_length(e.geom);
      raw.push_back(std::move(e));
      start = i;
    }
  }

  // Degree before stub removal, to recognise dangling clipped ends.
  std::unordered_map<std::int64_t, int> deg;
  for (const RawEdge& e : raw) ++deg[e.u], ++deg[e.v];
  std::erase_if(raw, [&](const RawEdge& e) {
    if (!(e.length > 0)) {
      ++st.zero_length_dropped;
      return true;
    }
    const bool dangling = (clip_end.contains(e.u) && deg[e.u] == 1) || (clip_end.contains(e.v) && deg[e.v] == 1);
    if (dangling && e.length < 1.0) {
      ++st.stubs_dropped;
      return true;
    }
    return false;
  });

  std::vector<std::int64_t> ids;
  for (const RawEdge& e : raw) ids.push_back(e.u), ids.push_back(e.v);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.empty()) {
    if (allow_empty) return {};
    throw Error("no pedestrian network in region");
  }

  std::vector<GraphNode> nodes;
  nodes.reserve(ids.size());
  std::unordered_map<std::int64_t, std::uint32_t> idx;
  for (std::int64_t id : ids) {
    idx.emplace(id, static_cast<std::uint32_t>(nodes.size()));
    nodes.push_back({id, pos.at(id)});
  }
  std::vector<GraphEdge> edges;
  edges.reserve(raw.size());
  for (RawEdge& e : raw) edges.push_back({idx.at(e.u), idx.at(e.v), e.length, std::move(e.geom), e.way_id});
  return PedestrianGraph(std::move(nodes), std::move(edges));
}

}  // namespace pedaccess

#endif  // PEDACCESS_OSM_PEDESTRIAN_GRAPH_HPP

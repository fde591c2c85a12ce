#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "pedaccess/network/accessibility.hpp"
#include "pedaccess/network/intersections.hpp"
#include "pedaccess/network/shortest_paths.hpp"

using namespace pedaccess;

namespace {

PedestrianGraph make_graph(const std::vector<Point>& pts, const std::vector<std::tuple<int, int, double>>& edges) {
  std::vector<GraphNode> nodes;
  for (std::size_t i = 0; i < pts.size(); ++i) nodes.push_back({static_cast<std::int64_t>(i + 1), pts[i]});
  std::vector<GraphEdge> es;
  for (const auto& [u, v, len] : edges)
    es.push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v), len, {pts[u], pts[v]}, 1});
  return PedestrianGraph(std::move(nodes), std::move(es));
}

// Connected random geometric graph with detour factors on edge lengths.
PedestrianGraph random_graph(int n, std::uint64_t seed, double extent = 3000) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0, extent), detour(1.0, 1.6);
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back({coord(rng), coord(rng)});
  std::vector<std::tuple<int, int, double>> edges;
  for (int i = 1; i < n; ++i) {
    // Tree edge to the nearest earlier node keeps the graph connected.
    int best = 0;
    for (int j = 1; j < i; ++j)
      if (distance(pts[i], pts[j]) < distance(pts[i], pts[best])) best = j;
    edges.emplace_back(best, i, distance(pts[i], pts[best]) * detour(rng));
  }
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int k = 0; k < n; ++k) {
    const int a = pick(rng), b = pick(rng);
    if (a != b && distance(pts[a], pts[b]) < extent / 6) edges.emplace_back(a, b, distance(pts[a], pts[b]) * detour(rng));
  }
  return make_graph(pts, edges);
}

// Textbook O(V²) Dijkstra without cutoff; infinity for unreachable.
std::vector<double> textbook_sssp(const PedestrianGraph& g, std::uint32_t s) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d(g.node_count(), inf);
  std::vector<bool> done(g.node_count(), false);
  d[s] = 0;
  for (std::size_t it = 0; it < g.node_count(); ++it) {
    std::size_t u = g.node_count();
    for (std::size_t v = 0; v < g.node_count(); ++v)
      if (!done[v] && d[v] < inf && (u == g.node_count() || d[v] < d[u])) u = v;
    if (u == g.node_count()) break;
    done[u] = true;
    for (const GraphEdge& e : g.edges()) {
      if (e.u == u && d[u] + e.length < d[e.v]) d[e.v] = d[u] + e.length;
      if (e.v == u && d[u] + e.length < d[e.u]) d[e.u] = d[u] + e.length;
    }
  }
  return d;
}

std::map<std::uint32_t, double> as_map(const DistanceMap& m) { return {m.begin(), m.end()}; }

}  // namespace

TEST(BoundedSssp, PathGraphCutoff) {
  const auto g = make_graph({{0, 0}, {100, 0}, {200, 0}}, {{0, 1, 100}, {1, 2, 100}});
  EXPECT_EQ(as_map(bounded_sssp(g, 0, 150)), (std::map<std::uint32_t, double>{{0, 0.0}, {1, 100.0}}));
  EXPECT_EQ(as_map(bounded_sssp(g, 0, 0)), (std::map<std::uint32_t, double>{{0, 0.0}}));
  EXPECT_EQ(as_map(bounded_sssp(g, 0, 200)).size(), 3u);
  EXPECT_THROW(bounded_sssp(g, 7, 100), Error);
  EXPECT_THROW(bounded_sssp(g, 0, -1), Error);
}

TEST(BoundedSssp, MatchesTextbookOnRandomGraph) {
  const auto g = random_graph(500, 11);
  BoundedDijkstra dj(g);
  for (std::uint32_t s : {0u, 17u, 123u, 256u, 499u}) {
    const auto full = textbook_sssp(g, s);
    for (double cutoff : {300.0, 1000.0, 2500.0}) {
      const auto got = as_map(dj.run(s, cutoff));
      std::map<std::uint32_t, double> expect;
      for (std::uint32_t v = 0; v < g.node_count(); ++v)
        if (full[v] <= cutoff) expect[v] = full[v];
      ASSERT_EQ(got.size(), expect.size()) << s << " " << cutoff;
      for (const auto& [v, d] : expect) EXPECT_NEAR(got.at(v), d, 1e-9);
    }
  }
}

TEST(BoundedSssp, TriangleInequalityOnOutput) {
  const auto g = random_graph(300, 5);
  const auto m = as_map(bounded_sssp(g, 3, 1200));
  for (const GraphEdge& e : g.edges()) {
    auto iu = m.find(e.u), iv = m.find(e.v);
    if (iu != m.end() && iv != m.end()) {
      EXPECT_LE(iv->second, iu->second + e.length + 1e-9);
      EXPECT_LE(iu->second, iv->second + e.length + 1e-9);
    }
  }
}

TEST(Intersections, CloseNodesMergeAtMidpoint) {
  // Two degree-3 nodes 5 m apart, each with two leaves, linked to each other.
  const auto g = make_graph({{0, 0}, {5, 0}, {-50, 30}, {-50, -30}, {55, 30}, {55, -30}},
                            {{0, 1, 5}, {0, 2, 58}, {0, 3, 58}, {1, 4, 58}, {1, 5, 58}});
  const auto s = consolidate_intersections(g, 12);
  ASSERT_EQ(s.points.size(), 1u);
  EXPECT_NEAR(s.points[0].x, 2.5, 1e-12);
  EXPECT_NEAR(s.points[0].y, 0.0, 1e-12);
  EXPECT_EQ(s.members[0], (std::vector<std::uint32_t>{0, 1}));
  EXPECT_EQ(consolidate_intersections(g, 4).points.size(), 2u);
  EXPECT_THROW(consolidate_intersections(g, 0), Error);
}

TEST(Intersections, ChainHasNone) {
  const auto g = make_graph({{0, 0}, {100, 0}, {200, 0}, {300, 0}}, {{0, 1, 100}, {1, 2, 100}, {2, 3, 100}});
  EXPECT_TRUE(consolidate_intersections(g, 12).points.empty());
}

namespace {

// Round-based transitive clustering with O(n²) neighbour tests and BFS components.
std::set<std::pair<long long, long long>> brute_consolidate(const PedestrianGraph& g, double tol) {
  std::vector<std::vector<std::uint32_t>> groups;
  for (std::uint32_t i = 0; i < g.node_count(); ++i)
    if (g.degree(i) >= 3) groups.push_back({i});
  auto centroid = [&](const std::vector<std::uint32_t>& grp) {
    std::vector<std::uint32_t> s = grp;
    std::sort(s.begin(), s.end());
    Point c{0, 0};
    for (auto v : s) c = c + g.node(v).position;
    return (1.0 / static_cast<double>(s.size())) * c;
  };
  for (;;) {
    std::vector<Point> pts;
    for (const auto& grp : groups) pts.push_back(centroid(grp));
    const std::size_t n = pts.size();
    std::vector<int> comp(n, -1);
    int ncomp = 0;
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (comp[i] >= 0) continue;
      std::vector<std::size_t> stack{i};
      comp[i] = ncomp;
      while (!stack.empty()) {
        const auto a = stack.back();
        stack.pop_back();
        for (std::size_t b = 0; b < n; ++b)
          if (comp[b] < 0 && distance(pts[a], pts[b]) <= tol) {
            comp[b] = ncomp;
            stack.push_back(b);
            any = true;
          }
      }
      ++ncomp;
    }
    if (!any) {
      std::set<std::pair<long long, long long>> out;
      for (const Point& p : pts) out.emplace(std::llround(p.x * 1e6), std::llround(p.y * 1e6));
      return out;
    }
    std::vector<std::vector<std::uint32_t>> next(ncomp);
    for (std::size_t i = 0; i < n; ++i) next[comp[i]].insert(next[comp[i]].end(), groups[i].begin(), groups[i].end());
    groups = std::move(next);
  }
}

// Jittered grid city; some crossings are split into two or three close nodes.
PedestrianGraph grid_city(int n, double spacing, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jit(-3, 3);
  std::bernoulli_distribution split(0.3);
  std::vector<Point> pts;
  std::vector<std::tuple<int, int, double>> edges;
  std::vector<int> id(n * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      id[r * n + c] = static_cast<int>(pts.size());
      pts.push_back({c * spacing + jit(rng), r * spacing + jit(rng)});
    }
  auto link = [&](int a, int b) { edges.emplace_back(a, b, std::max(distance(pts[a], pts[b]), 0.1)); };
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      if (c + 1 < n) link(id[r * n + c], id[r * n + c + 1]);
      if (r + 1 < n) link(id[r * n + c], id[(r + 1) * n + c]);
      if (split(rng)) {
        // Dual-carriageway style: a second node 6-9 m away with its own spur.
        const int a = id[r * n + c];
        const int b = static_cast<int>(pts.size());
        pts.push_back(pts[a] + Point{6 + jit(rng) / 2, 6 + jit(rng) / 2});
        const int leaf1 = static_cast<int>(pts.size());
        pts.push_back(pts[b] + Point{30, 5});
        const int leaf2 = static_cast<int>(pts.size());
        pts.push_back(pts[b] + Point{5, 30});
        link(a, b);
        link(b, leaf1);
        link(b, leaf2);
      }
    }
  return make_graph(pts, edges);
}

}  // namespace

TEST(Intersections, GridCityMatchesBruteForce) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto g = grid_city(14, 80, seed);
    for (double tol : {12.0, 25.0}) {
      const auto s = consolidate_intersections(g, tol);
      std::set<std::pair<long long, long long>> got;
      for (const Point& p : s.points) got.emplace(std::llround(p.x * 1e6), std::llround(p.y * 1e6));
      EXPECT_EQ(got, brute_consolidate(g, tol)) << seed << " " << tol;
      EXPECT_LE(s.points.size(), s.candidate_nodes);
      for (std::size_t i = 0; i < s.points.size(); ++i)
        for (std::size_t j = i + 1; j < s.points.size(); ++j) EXPECT_GT(distance(s.points[i], s.points[j]), tol);
    }
  }
}

TEST(Intersections, HexCountsAndDensity) {
  const auto g = grid_city(6, 100, 9);
  auto s = consolidate_intersections(g, 12);
  HexGrid grid(Box{-50, -50, 600, 600}, 250);
  assign_intersections(s, grid);
  std::int64_t total = 0;
  for (const HexCell& c : grid.cells()) {
    total += c.intersection_count;
    EXPECT_NEAR(c.intersection_density, c.intersection_count / c.area_km2, 1e-9);
  }
  EXPECT_EQ(total + static_cast<std::int64_t>(s.outside_grid), static_cast<std::int64_t>(s.points.size()));
  EXPECT_EQ(s.outside_grid, 0u);
}

TEST(Catchments, IsolatedNodeHasOwnHex) {
  const auto g = make_graph({{0, 0}, {1000, 0}, {1100, 0}}, {{1, 2, 100}});
  const HexGrid grid(Box{-10, -10, 1200, 10}, 250);
  const auto hex = assign_nodes_to_hexes(g, grid);
  const auto c = node_catchments(g, hex, 1000);
  EXPECT_EQ(c[0], (std::vector<std::int64_t>{hex[0]}));
}

TEST(Catchments, PathAcrossThreeHexes) {
  const double R = 125, h = std::sqrt(3.0) * R;
  const std::vector<Point> pts{{0, 0}, {1.5 * R, h / 2}, {3 * R, 0}};
  const auto g = make_graph(pts, {{0, 1, distance(pts[0], pts[1])}, {1, 2, distance(pts[1], pts[2])}});
  const HexGrid grid(Box{-10, -10, 400, 120}, 2 * R);
  const auto hex = assign_nodes_to_hexes(g, grid);
  EXPECT_EQ(std::set<std::int64_t>(hex.begin(), hex.end()).size(), 3u);
  const auto c = node_catchments(g, hex, 1000);
  std::vector<std::int64_t> all(hex.begin(), hex.end());
  std::sort(all.begin(), all.end());
  EXPECT_EQ(c[2], all);
}

TEST(Catchments, MatchPairwiseBruteForceAndThreading) {
  const auto g = random_graph(250, 21, 2500);
  Box b;
  for (const auto& n : g.nodes()) b.extend(n.position);
  const HexGrid grid(b, 250);
  const auto hex = assign_nodes_to_hexes(g, grid);
  const auto one = node_catchments(g, hex, 600, 1);
  const auto four = node_catchments(g, hex, 600, 4);
  EXPECT_EQ(one, four);
  for (std::uint32_t n = 0; n < g.node_count(); n += 7) {
    const auto d = textbook_sssp(g, n);
    std::set<std::int64_t> expect{hex[n]};
    for (std::uint32_t m = 0; m < g.node_count(); ++m)
      if (d[m] <= 600) expect.insert(hex[m]);
    EXPECT_EQ(std::vector<std::int64_t>(expect.begin(), expect.end()), one[n]) << n;
  }
  const auto wider = node_catchments(g, hex, 900, 2);
  for (std::size_t n = 0; n < g.node_count(); ++n)
    EXPECT_TRUE(std::includes(wider[n].begin(), wider[n].end(), one[n].begin(), one[n].end()));
}

TEST(DestinationField, EmptyAndZeroAtHost) {
  const auto g = make_graph({{0, 0}, {100, 0}, {200, 0}}, {{0, 1, 100}, {1, 2, 100}});
  const auto empty = nearest_destination_field(g, PoiSet{"x", {}}, 500, 1600);
  for (const auto& d : empty.distance) EXPECT_FALSE(d);
  const auto f = nearest_destination_field(g, PoiSet{"x", {{"n9", {101, 3}, {}}}}, 500, 150);
  EXPECT_EQ(f.distance[1], 0.0);
  EXPECT_EQ(f.distance[0], 100.0);
  EXPECT_EQ(f.distance[2], 100.0);
  const auto g2 = nearest_destination_field(g, PoiSet{"x", {{"n9", {200, 0}, {}}}}, 500, 150);
  EXPECT_FALSE(g2.distance[0]);
  const auto far = nearest_destination_field(g, PoiSet{"x", {{"n9", {900, 0}, {}}}}, 500, 1600);
  EXPECT_EQ(far.pois_dropped, 1u);
  EXPECT_THROW(nearest_destination_field(PedestrianGraph{}, PoiSet{}, 500, 100), Error);
}

TEST(DestinationField, EqualsMinOverPerDestinationSearches) {
  const auto g = random_graph(500, 33);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> coord(0, 3000);
  PoiSet pois{"shop", {}};
  for (int i = 0; i < 25; ++i) pois.points.push_back({"n" + std::to_string(i), {coord(rng), coord(rng)}, {}});
  const double cutoff = 800;
  const NodeSnapper snap(g, 500);
  const auto f = nearest_destination_field(g, snap, pois, cutoff);
  std::vector<std::optional<double>> expect(g.node_count());
  for (const Poi& p : pois.points) {
    const auto host = snap.snap(p.location);
    if (!host) continue;
    for (const auto& [v, d] : bounded_sssp(g, *host, cutoff))
      if (!expect[v] || d < *expect[v]) expect[v] = d;
  }
  std::size_t reached = 0;
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    ASSERT_EQ(f.distance[v].has_value(), expect[v].has_value()) << v;
    if (expect[v]) {
      EXPECT_NEAR(*f.distance[v], *expect[v], 1e-9);
      EXPECT_LE(*f.distance[v], cutoff);
      ++reached;
    }
  }
  EXPECT_GT(reached, 100u);
  // Adding a destination never increases a distance.
  PoiSet more = pois;
  more.points.push_back({"extra", {1500, 1500}, {}});
  const auto f2 = nearest_destination_field(g, snap, more, cutoff);
  for (std::size_t v = 0; v < g.node_count(); ++v)
    if (f.distance[v]) {
      ASSERT_TRUE(f2.distance[v]);
      EXPECT_LE(*f2.distance[v], *f.distance[v]);
    }
}

TEST(LocalDensity, MeansOverCatchment) {
  HexGrid grid(Box{0, 0, 1000, 1000}, 250);
  grid[0].pop_density = 4000;
  grid[1].pop_density = 1000;
  grid[2].pop_density = 3000;
  grid[1].intersection_density = 50;
  const auto d = node_local_density({{0}, {1, 2}}, grid);
  EXPECT_EQ(d[0].pop_density, 4000);
  EXPECT_EQ(d[1].pop_density, 2000);
  EXPECT_EQ(d[1].intersection_density, 25);
  EXPECT_THROW(node_local_density({{999999}}, grid), Error);
  EXPECT_THROW(node_local_density({{}}, grid), Error);
}

TEST(LocalDensity, RandomRecomputation) {
  HexGrid grid(Box{0, 0, 3000, 3000}, 250);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> v(0, 20000);
  for (HexCell& c : grid.cells()) c.pop_density = v(rng), c.intersection_density = v(rng) / 100;
  std::uniform_int_distribution<std::int64_t> pick(0, static_cast<std::int64_t>(grid.size()) - 1);
  std::vector<std::vector<std::int64_t>> cat(50);
  for (auto& c : cat) {
    std::set<std::int64_t> s;
    for (int k = 0; k < 12; ++k) s.insert(pick(rng));
    c.assign(s.begin(), s.end());
  }
  const auto d = node_local_density(cat, grid);
  for (std::size_t n = 0; n < cat.size(); ++n) {
    long double p = 0, q = 0;
    for (auto h : cat[n]) p += grid[h].pop_density, q += grid[h].intersection_density;
    EXPECT_NEAR(d[n].pop_density, static_cast<double>(p / cat[n].size()), 1e-12 * 20000);
    EXPECT_NEAR(d[n].intersection_density, static_cast<double>(q / cat[n].size()), 1e-12 * 200);
  }
}

#include <cmath>
#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "pedaccess/geometry/boundary.hpp"
#include "pedaccess/geometry/grid_index.hpp"
#include "pedaccess/geometry/hexgrid.hpp"
#include "pedaccess/geometry/projection.hpp"

using namespace pedaccess;

namespace {

// Independent reference: classic USGS transverse Mercator series in powers of
// (dlon · cos lat), no relation to the Krueger series used by the library.
Point usgs_utm(double lat_deg, double lon_deg, int zone) {
  const double a = 6378137.0, f = 1 / 298.257223563, k0 = 0.9996;
  const double e2 = f * (2 - f), ep2 = e2 / (1 - e2);
  const double e4 = e2 * e2, e6 = e4 * e2;
  const double d = M_PI / 180.0;
  const double phi = lat_deg * d;
  const double lam0 = (-183.0 + 6.0 * zone) * d;
  const double N = a / std::sqrt(1 - e2 * std::sin(phi) * std::sin(phi));
  const double T = std::tan(phi) * std::tan(phi);
  const double C = ep2 * std::cos(phi) * std::cos(phi);
  const double A = (lon_deg * d - lam0) * std::cos(phi);
  const double M = a * ((1 - e2 / 4 - 3 * e4 / 64 - 5 * e6 / 256) * phi -
                        (3 * e2 / 8 + 3 * e4 / 32 + 45 * e6 / 1024) * std::sin(2 * phi) +
                        (15 * e4 / 256 + 45 * e6 / 1024) * std::sin(4 * phi) - (35 * e6 / 3072) * std::sin(6 * phi));
  const double x = k0 * N *
                   (A + (1 - T + C) * std::pow(A, 3) / 6 + (5 - 18 * T + T * T + 72 * C - 58 * ep2) * std::pow(A, 5) / 120);
  const double y =
      k0 * (M + N * std::tan(phi) *
                    (A * A / 2 + (5 - T + 9 * C + 4 * C * C) * std::pow(A, 4) / 24 +
                     (61 - 58 * T + T * T + 600 * C - 330 * ep2) * std::pow(A, 6) / 720));
  return {500000.0 + x, lat_deg < 0 ? y + 10000000.0 : y};
}

Polygon square(double x0, double y0, double side) {
  return rectangle(Box{x0, y0, x0 + side, y0 + side});
}

}  // namespace

TEST(UtmZone, Formula) {
  EXPECT_EQ(utm_zone_for(0.5), 31);
  EXPECT_EQ(utm_zone_for(-180.0), 1);
  EXPECT_EQ(utm_zone_for(179.999), 60);
  EXPECT_EQ(utm_zone_for(7.8509), 32);
}

TEST(Projection, CentralMeridianHasFalseEasting) {
  const UtmZone z{32, false};
  EXPECT_NEAR(project({47.0, 9.0}, z).x, 500000.0, 1e-6);
  EXPECT_NEAR(project({-33.0, 9.0}, {32, true}).x, 500000.0, 1e-6);
}

TEST(Projection, EquatorHasZeroNorthing) {
  EXPECT_NEAR(project({0.0, 10.0}, {32, false}).y, 0.0, 1e-6);
  EXPECT_NEAR(project({0.0, 10.0}, {32, true}).y, 10000000.0, 1e-6);
}

TEST(Projection, MatchesIndependentSeries) {
  const Point p = project({47.9941, 7.8509}, {32, false});
  const Point ref = usgs_utm(47.9941, 7.8509, 32);
  EXPECT_LT(std::abs(p.x - ref.x), 0.01);
  EXPECT_LT(std::abs(p.y - ref.y), 0.01);
  // Frozen from the reference series.
  EXPECT_NEAR(p.x, 414273.1260, 0.01);
  EXPECT_NEAR(p.y, 5316283.2914, 0.01);
}

TEST(Projection, RoundTripBelowOneMillimetre) {
  std::mt19937_64 rng(7);
  for (int zone : {1, 18, 32, 35, 60}) {
    for (bool south : {false, true}) {
      const UtmZone z{zone, south};
      std::uniform_real_distribution<double> dlon(-3.0, 3.0);
      std::uniform_real_distribution<double> lat(south ? -80.0 : 0.0, south ? 0.0 : 84.0);
      for (int i = 0; i < 10000; ++i) {
        const LatLon ll{lat(rng), z.central_meridian() + dlon(rng)};
        const Point p = project(ll, z);
        const Point back = project(unproject(p, z), z);
        ASSERT_LT(distance(p, back), 1e-3) << ll.lat << " " << ll.lon;
      }
    }
  }
}

TEST(Projection, RejectsPolarLatitude) { EXPECT_THROW(project({85.0, 0.0}, {31, false}), Error); }

TEST(HexGrid, CellAreaMatchesFormula) {
  const auto cells = hex_tessellate(Box{0, 0, 1000, 1000}, 250.0);
  ASSERT_FALSE(cells.empty());
  for (const HexCell& c : cells) {
    // (3√3/8)·250² = 40594.9408 m²
    EXPECT_NEAR(std::abs(signed_area(c.polygon().outer)), 40594.940802, 1e-3);
    EXPECT_NEAR(c.area_km2 * 1e6, 3 * std::sqrt(3.0) / 8 * 250 * 250, 1e-3);
    EXPECT_NEAR(distance(c.vertices[0], c.vertices[3]), 250.0, 1e-9);
  }
  EXPECT_NEAR(hexagon_area(250.0), 40594.940802, 1e-6);
}

TEST(HexGrid, TinyBoxIsCovered) {
  const Box b{100.0, 100.0, 101.0, 102.0};
  HexGrid g(b, 250.0);
  ASSERT_GE(g.size(), 1u);
  for (double x = b.min_x; x <= b.max_x; x += 0.25)
    for (double y = b.min_y; y <= b.max_y; y += 0.25) EXPECT_TRUE(g.locate({x, y}).has_value());
}

TEST(HexGrid, CountMatchesLatticeEnumeration) {
  const Box b{10.0, 20.0, 1010.0, 1020.0};
  HexGrid g(b, 250.0);
  // Brute force: each lattice point belongs to the nearest lattice center (Voronoi cell of a
  // regular hexagonal lattice); centers enumerated directly from the two lattice vectors.
  const double R = 125.0, h = std::sqrt(3.0) * R;
  std::vector<Point> centers;
  for (int i = -10; i <= 20; ++i)
    for (int j = -10; j <= 20; ++j) centers.push_back({1.5 * R * i, h * j + (std::abs(i) % 2 ? h / 2 : 0.0)});
  std::set<std::pair<long, long>> hit;
  for (int x = 10; x <= 1010; ++x)
    for (int y = 20; y <= 1020; ++y) {
      std::size_t best = 0;
      double bd = 1e300;
      for (std::size_t k = 0; k < centers.size(); ++k) {
        const double d = squared_distance(centers[k], {double(x), double(y)});
        if (d < bd) bd = d, best = k;
      }
      hit.insert({std::lround(centers[best].x * 100), std::lround(centers[best].y * 100)});
    }
  EXPECT_EQ(g.size(), hit.size());
  for (const HexCell& c : g.cells()) EXPECT_TRUE(hit.count({std::lround(c.center.x * 100), std::lround(c.center.y * 100)}));
}

TEST(HexGrid, AreaPartitionAndUniqueMembership) {
  const Box b{-337.0, 55.0, 1211.0, 943.0};
  HexGrid g(b, 250.0);
  double total = 0;
  for (const HexCell& c : g.cells()) {
    const auto parts = polygon_intersection(c.polygon(), rectangle(b));
    total += area(parts);
  }
  EXPECT_NEAR(total / (b.width() * b.height()), 1.0, 1e-6);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(b.min_x, b.max_x), uy(b.min_y, b.max_y);
  for (int i = 0; i < 20000; ++i) {
    const Point p{ux(rng), uy(rng)};
    int inside = 0;
    for (const HexCell& c : g.cells()) inside += g.hex_contains(c.center, p, -1e-9) ? 1 : 0;
    ASSERT_LE(inside, 1);
    const auto id = g.locate(p);
    ASSERT_TRUE(id.has_value());
    ASSERT_TRUE(g.hex_contains(g[*id].center, p));
  }
}

TEST(HexGrid, IdsAreRowMajor) {
  HexGrid g(Box{0, 0, 2000, 2000}, 250.0);
  for (std::size_t i = 1; i < g.size(); ++i) {
    const auto& a = g.cells()[i - 1];
    const auto& b = g.cells()[i];
    EXPECT_TRUE(a.row < b.row || (a.row == b.row && a.col < b.col));
    EXPECT_EQ(b.id, static_cast<std::int64_t>(i));
  }
}

TEST(BufferedRegion, InteriorAndBufferEdge) {
  const Polygon region = square(0, 0, 1000);
  EXPECT_TRUE(in_buffered_region({500, 500}, region, 0));
  EXPECT_FALSE(in_buffered_region({1000 + 1601, 500}, region, 1600));
  EXPECT_TRUE(in_buffered_region({1000 + 1600, 500}, region, 1600));
  EXPECT_TRUE(in_buffered_region({1000, 500}, region, 0));
  EXPECT_FALSE(in_buffered_region({1000.5, 500}, region, 0));
}

TEST(BufferedRegion, MonotoneInBuffer) {
  Polygon region{{{0, 0}, {800, 0}, {900, 600}, {400, 300}, {0, 700}, {0, 0}}, {}};
  normalize(region);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2000, 3000);
  for (int i = 0; i < 2000; ++i) {
    const Point p{u(rng), u(rng)};
    bool prev = false;
    for (double b : {0.0, 10.0, 100.0, 500.0, 1600.0, 5000.0}) {
      const bool now = in_buffered_region(p, region, b);
      EXPECT_TRUE(!prev || now);
      prev = now;
    }
  }
}

TEST(BufferedRegion, IndexedMatchesPredicate) {
  Polygon region{{{0, 0}, {800, 0}, {900, 600}, {400, 300}, {0, 700}, {0, 0}}, {{{100, 100}, {200, 100}, {200, 200}, {100, 200}, {100, 100}}}};
  normalize(region);
  BufferedRegion br({region}, 120.0);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-300, 1200);
  for (int i = 0; i < 5000; ++i) {
    const Point p{u(rng), u(rng)};
    EXPECT_EQ(br.contains(p), in_buffered_region(p, region, 120.0));
  }
  EXPECT_FALSE(in_buffered_region({150, 150}, region, 0));
  EXPECT_TRUE(in_buffered_region({150, 150}, region, 50));
}

TEST(PolygonIntersection, SelfIntersectionIsIdentity) {
  const Polygon a = square(0, 0, 1);
  EXPECT_NEAR(area(polygon_intersection(a, a)), 1.0, 1e-6);
}

TEST(PolygonIntersection, DisjointIsEmpty) {
  EXPECT_TRUE(polygon_intersection(square(0, 0, 1), square(5, 5, 1)).empty());
}

TEST(PolygonIntersection, OffsetSquares) {
  const auto r = polygon_intersection(square(0, 0, 1), square(0.5, 0, 1));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(area(r), 0.5, 1e-12);
  const Box b = bounding_box(r);
  EXPECT_NEAR(b.min_x, 0.5, 1e-12);
  EXPECT_NEAR(b.max_x, 1.0, 1e-12);
}

TEST(PolygonIntersection, SymmetricAreaAndBounded) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 10);
  for (int i = 0; i < 200; ++i) {
    Polygon a{{{u(rng), u(rng)}, {u(rng) + 10, u(rng)}, {u(rng) + 10, u(rng) + 10}, {u(rng), u(rng) + 10}}, {}};
    Polygon b = square(u(rng), u(rng), 8);
    normalize(a);
    const double ab = area(polygon_intersection(a, b));
    const double ba = area(polygon_intersection(b, a));
    EXPECT_LT(std::abs(ab - ba), 1e-9);
    EXPECT_LE(ab, std::min(area(a), area(b)) + 1e-9);
  }
}

TEST(PolygonIntersection, WithHole) {
  Polygon a = square(0, 0, 10);
  a.holes.push_back({{4, 4}, {6, 4}, {6, 6}, {4, 6}, {4, 4}});
  normalize(a);
  EXPECT_NEAR(area(polygon_intersection(a, square(0, 0, 10))), 96.0, 1e-9);
}

TEST(PolygonIntersection, InvalidRingThrows) {
  Polygon bad{{{0, 0}, {1, 0}, {0, 0}}, {}};
  EXPECT_THROW(polygon_intersection(bad, square(0, 0, 1)), Error);
  Polygon bowtie{{{0, 0}, {1, 1}, {1, 0}, {0, 1}, {0, 0}}, {}};
  EXPECT_THROW(validate(bowtie), Error);
}

TEST(GridIndex, EmptyAndSingle) {
  GridIndex<Point> idx(10.0);
  EXPECT_FALSE(nearest_within(idx, {0, 0}, 100).has_value());
  idx.insert({3, 0});
  const auto n = nearest_within(idx, {0, 0}, 10);
  ASSERT_TRUE(n.has_value());
  EXPECT_EQ(n->id, 0u);
  EXPECT_DOUBLE_EQ(n->distance, 3.0);
}

TEST(GridIndex, MatchesExhaustiveScan) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0, 1000);
  std::vector<Point> pts(1000);
  for (auto& p : pts) p = {std::round(u(rng)), std::round(u(rng))};  // rounding creates ties
  GridIndex<Point> idx(37.0, pts);
  for (int q = 0; q < 1000; ++q) {
    const Point p{std::round(u(rng)), std::round(u(rng))};
    const double r = u(rng) / 10;
    std::optional<Neighbor> brute;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double d = distance(p, pts[i]);
      if (d <= r && (!brute || d < brute->distance)) brute = Neighbor{i, d};
    }
    const auto got = nearest_within(idx, p, r);
    ASSERT_EQ(got.has_value(), brute.has_value());
    if (got) {
      EXPECT_EQ(got->id, brute->id);
      EXPECT_EQ(got->distance, brute->distance);
    }
  }
}

TEST(GridIndex, SegmentsMatchExhaustiveScan) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0, 1000), v(-40, 40);
  std::vector<Segment> segs;
  for (int i = 0; i < 300; ++i) {
    Point a{u(rng), u(rng)};
    segs.push_back({a, a + Point{v(rng), v(rng)}});
  }
  GridIndex<Segment> idx(25.0, segs);
  for (int q = 0; q < 500; ++q) {
    const Point p{u(rng), u(rng)};
    double brute = 1e300;
    for (const auto& s : segs) brute = std::min(brute, segment_distance(p, s.a, s.b));
    const auto got = nearest_distance(idx, p, 60.0);
    if (brute <= 60.0) {
      ASSERT_TRUE(got.has_value());
      EXPECT_DOUBLE_EQ(*got, brute);
    } else {
      EXPECT_FALSE(got.has_value());
    }
  }
}

TEST(Polygon, CentroidOfSquare) {
  EXPECT_NEAR(centroid(square(0, 0, 1).outer).x, 0.5, 1e-12);
  EXPECT_NEAR(centroid(square(0, 0, 1).outer).y, 0.5, 1e-12);
}

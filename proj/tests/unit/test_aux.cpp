#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "pedaccess/auxdata/csv.hpp"
#include "pedaccess/auxdata/gtfs.hpp"
#include "pedaccess/auxdata/raster.hpp"
#include "pedaccess/auxdata/zip.hpp"

using namespace pedaccess;

namespace {

PopulationRaster grid_from(const std::string& text) {
  std::istringstream in(text);
  return read_ascii_grid(in);
}

const HexCell& hex_at_origin(const HexGrid& g) { return g[*g.locate({0, 0})]; }

HexCell shifted(const HexCell& c, Point d) {
  HexCell out = c;
  out.center = out.center + d;
  for (auto& v : out.vertices) v = v + d;
  return out;
}

// Independent oracle: scan every cell, center-in-polygon through the generic even-odd test.
double brute_hex_population(const PopulationRaster& r, const HexCell& cell) {
  const Polygon poly = cell.polygon();
  double sum = 0;
  int n = 0;
  for (int row = 0; row < r.nrows; ++row)
    for (int col = 0; col < r.ncols; ++col)
      if (contains(poly, r.center(col, row), 1e-9)) sum += r.value(col, row), ++n;
  return n ? sum / n : 0.0;
}

const std::string kGtfsDir = std::string(PEDACCESS_TEST_DATA) + "/gtfs_mini";
const std::string kGtfsZip = std::string(PEDACCESS_TEST_DATA) + "/gtfs_mini.zip";

gtfs::Date ymd(int y, unsigned m, unsigned d) {
  return gtfs::Date{std::chrono::year(y), std::chrono::month(m), std::chrono::day(d)};
}

}  // namespace

TEST(Raster, TwoByTwoLookups) {
  const auto r = grid_from("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 10\nNODATA_value -9999\n1 2\n3 4\n");
  ASSERT_EQ(r.ncols, 2);
  EXPECT_EQ(r.value(0, 0), 1);
  EXPECT_EQ(r.value(1, 0), 2);
  EXPECT_EQ(r.value(0, 1), 3);
  EXPECT_EQ(r.value(1, 1), 4);
  EXPECT_EQ(r.center(0, 0), (Point{5, 15}));
  EXPECT_EQ(r.center(1, 0), (Point{15, 15}));
  EXPECT_EQ(r.center(0, 1), (Point{5, 5}));
  EXPECT_EQ(r.center(1, 1), (Point{15, 5}));
}

TEST(Raster, HeaderVariants) {
  const auto r = grid_from("NCOLS 1\nNROWS 1\nXLLCENTER 5\nYLLCENTER 5\nCELLSIZE 10\n7\n");
  EXPECT_EQ(r.center(0, 0), (Point{5, 5}));
  EXPECT_FALSE(r.nodata.has_value());
  EXPECT_EQ(r.value(0, 0), 7);
}

TEST(Raster, NodataCountsAsZero) {
  const auto r = grid_from("ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 10\nNODATA_value -9999\n-9999 4\n");
  EXPECT_EQ(r.value(0, 0), 0.0);
  EXPECT_EQ(r.nodata_cells, 1u);
}

TEST(Raster, MalformedInputs) {
  EXPECT_THROW(grid_from("ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\n1 2\n"), ParseError);
  EXPECT_THROW(grid_from("ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 10\n1 2 3\n"), ParseError);
  EXPECT_THROW(grid_from("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 10\n1 2\n"), ParseError);
  EXPECT_THROW(grid_from("ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 10\n1 x\n"), ParseError);
  EXPECT_THROW(grid_from("ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize zero\n1 2\n"), ParseError);
  EXPECT_THROW(grid_from("ncols 1\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 10\n-3\n"), ParseError);
  EXPECT_THROW(read_raster("/nonexistent/pop.asc"), ParseError);
}

TEST(Raster, GeographicFrameProjectsCenters) {
  auto r = grid_from("ncols 2\nnrows 1\nxllcorner 24.93\nyllcorner 60.16\ncellsize 0.01\n1 2\n");
  r.geographic = UtmZone{35, false};
  const Point expect = project(LatLon{60.165, 24.945}, *r.geographic);
  EXPECT_NEAR(distance(r.center(1, 0), expect), 0.0, 1e-6);
}

TEST(HexPopulation, MeanOfCentersInside) {
  const HexGrid g(Box{-1, -1, 1, 1}, 250);
  const auto r = grid_from("ncols 2\nnrows 1\nxllcorner -100\nyllcorner -50\ncellsize 100\n10 20\n");
  EXPECT_DOUBLE_EQ(hex_population(r, hex_at_origin(g)), 15.0);
  EXPECT_DOUBLE_EQ(hex_populations(r, g)[hex_at_origin(g).id], 15.0);
}

TEST(HexPopulation, FallsBackToOverlappingCells) {
  const HexGrid g(Box{-1, -1, 1, 1}, 250);
  // Two 1 km cells meet at x = 0; neither center lies in the hexagon.
  const auto r = grid_from("ncols 2\nnrows 1\nxllcorner -1000\nyllcorner -500\ncellsize 1000\n8 12\n");
  EXPECT_DOUBLE_EQ(hex_population(r, hex_at_origin(g)), 10.0);
  // A hexagon touching nothing gets zero.
  const auto far = grid_from("ncols 1\nnrows 1\nxllcorner 5000\nyllcorner 5000\ncellsize 100\n9\n");
  EXPECT_EQ(hex_population(far, hex_at_origin(g)), 0.0);
}

TEST(HexPopulation, AllNodataIsZero) {
  const HexGrid g(Box{-1, -1, 1, 1}, 250);
  const auto r = grid_from("ncols 2\nnrows 1\nxllcorner -100\nyllcorner -50\ncellsize 100\nNODATA_value -1\n-1 -1\n");
  EXPECT_EQ(hex_population(r, hex_at_origin(g)), 0.0);
}

TEST(HexPopulation, MatchesBruteForceScan) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> off(-50, 50), val(0, 500);
  std::ostringstream text;
  const int n = 60;
  text << "ncols " << n << "\nnrows " << n << "\nxllcorner " << 37.3 << "\nyllcorner " << -12.9
       << "\ncellsize 100\nNODATA_value -9999\n";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) text << ((i * 7 + j) % 13 == 0 ? -9999.0 : std::round(val(rng))) << ' ';
    text << '\n';
  }
  const auto r = grid_from(text.str());
  const HexGrid g(Box{700, 600, 5200, 5500}, 400);
  const auto bulk = hex_populations(r, g);
  ASSERT_GT(g.size(), 100u);
  for (const HexCell& c : g.cells()) {
    const double expect = brute_hex_population(r, c);
    EXPECT_NEAR(hex_population(r, c), expect, 1e-9) << c.id;
    EXPECT_NEAR(bulk[c.id], expect, 1e-9) << c.id;
  }
  (void)off;
}

TEST(HexPopulation, TranslationConsistent) {
  const HexGrid g(Box{-1, -1, 1, 1}, 250);
  const std::string body = "cellsize 50\n1 2 3 4 5\n6 7 8 9 10\n11 12 13 14 15\n16 17 18 19 20\n21 22 23 24 25\n";
  const auto a = grid_from("ncols 5\nnrows 5\nxllcorner -130\nyllcorner -110\n" + body);
  const auto b = grid_from("ncols 5\nnrows 5\nxllcorner 370870\nyllcorner 6670890\n" + body);
  const HexCell& c = hex_at_origin(g);
  EXPECT_NEAR(hex_population(a, c), hex_population(b, shifted(c, {371000, 6671000})), 1e-9);
}

TEST(RegionPopulation, SumOfCentersInside) {
  const auto r = grid_from("ncols 4\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 10\n10 20 5 7\n");
  EXPECT_DOUBLE_EQ(region_population(r, {rectangle(Box{0, 0, 30, 10})}), 35.0);
  EXPECT_EQ(region_population(r, {}), 0.0);
  EXPECT_DOUBLE_EQ(region_population(r, {rectangle(Box{0, 0, 40, 10})}), 42.0);
}

TEST(RegionPopulation, NodataExcludedFromTotal) {
  const auto r = grid_from("ncols 3\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 10\nNODATA_value -9999\n10 -9999 5\n");
  EXPECT_DOUBLE_EQ(region_population(r, {rectangle(Box{0, 0, 30, 10})}), 15.0);
}

TEST(RegionPopulation, DisjointPartsAddUp) {
  std::ostringstream text;
  text << "ncols 20\nnrows 20\nxllcorner 0\nyllcorner 0\ncellsize 10\n";
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) text << (i * 20 + j) % 17 << ' ';
    text << '\n';
  }
  const auto r = grid_from(text.str());
  // Split line passes through cell centers, so the closed boundary must not double count:
  // use a split at a cell edge and one off-grid.
  for (double split : {100.0, 73.3}) {
    const double whole = region_population(r, {rectangle(Box{3, 3, 197, 197})});
    const double left = region_population(r, {rectangle(Box{3, 3, split, 197})});
    const double right = region_population(r, {rectangle(Box{split, 3, 197, 197})});
    EXPECT_DOUBLE_EQ(left + right, whole) << split;
  }
}

TEST(Csv, QuotedFieldsAndLineEnds) {
  const auto rows = csv::parse("\xEF\xBB\xBF" "a,b,c\r\n1,\"x, \"\"y\"\"\",\r\n\"multi\nline\",2,3");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], (csv::Row{"a", "b", "c"}));
  EXPECT_EQ(rows[1], (csv::Row{"1", "x, \"y\"", ""}));
  EXPECT_EQ(rows[2], (csv::Row{"multi\nline", "2", "3"}));
  EXPECT_THROW(csv::parse("a,\"b\n"), ParseError);
}

TEST(Csv, WriteReadRoundTrip) {
  const csv::Row row{"plain", "with,comma", "with \"quote\"", "", "line\nbreak"};
  std::ostringstream out;
  csv::write_row(out, row);
  const auto back = csv::parse(out.str());
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], row);
  EXPECT_EQ(csv::format_number(0.1), "0.1");
  EXPECT_EQ(csv::format_number(std::nan("")), "");
}

TEST(Zip, ReadsStoredAndDeflatedMembers) {
  const zip::Archive z(kGtfsZip);
  for (const char* f : {"stops.txt", "calendar.txt", "trips.txt", "stop_times.txt"}) {
    std::ifstream in(kGtfsDir + "/" + f, std::ios::binary);
    const std::string expect((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto got = z.read(f);
    ASSERT_TRUE(got) << f;
    EXPECT_EQ(*got, expect) << f;
  }
  EXPECT_FALSE(z.read("shapes.txt"));
}

TEST(Gtfs, LoadDropsBrokenRowsAndCounts) {
  const auto feed = gtfs::load_feed(kGtfsDir);
  EXPECT_EQ(feed.stops.size(), 4u);
  EXPECT_EQ(feed.stops[1].name, "Kamppi, \"East\"");
  EXPECT_EQ(feed.trips.size(), 8u);
  EXPECT_EQ(feed.stop_times.size(), 10u);
  const auto& d = feed.diagnostics;
  EXPECT_EQ(d.stops_bad_coordinates, 1u);
  EXPECT_EQ(d.trips_unknown_service, 1u);
  EXPECT_EQ(d.stop_times_unknown_trip, 1u);
  EXPECT_EQ(d.stop_times_unknown_stop, 1u);
  EXPECT_EQ(d.trips_non_monotonic, 1u);
  for (const auto& st : feed.stop_times) {
    EXPECT_LT(st.trip, feed.trips.size());
    EXPECT_LT(st.stop, feed.stops.size());
  }
}

TEST(Gtfs, ZipAndDirectoryAgree) {
  const auto a = gtfs::load_feed(kGtfsDir), b = gtfs::load_feed(kGtfsZip);
  ASSERT_EQ(a.stop_times.size(), b.stop_times.size());
  for (std::size_t i = 0; i < a.stop_times.size(); ++i) {
    EXPECT_EQ(a.stop_times[i].departure, b.stop_times[i].departure);
    EXPECT_EQ(a.stop_times[i].stop, b.stop_times[i].stop);
  }
}

TEST(Gtfs, TimeParsing) {
  EXPECT_EQ(gtfs::parse_time("08:30:00"), 30600);
  EXPECT_EQ(gtfs::parse_time(" 7:05:09"), 25509);
  EXPECT_EQ(gtfs::parse_time("25:10:00"), 90600);
  EXPECT_FALSE(gtfs::parse_time("08:60:00"));
  EXPECT_FALSE(gtfs::parse_time(""));
  EXPECT_FALSE(gtfs::parse_date("20240230"));
}

TEST(Gtfs, HeadwayOnBusiestDay) {
  const auto feed = gtfs::load_feed(kGtfsDir);
  // 2024-01-06 is a Saturday (one departure at S1), 2024-01-08 a Monday (08:00, 08:30, 09:00).
  const auto h = gtfs::stop_average_headway(feed, "S1", ymd(2024, 1, 6), ymd(2024, 1, 8), 0, 86400);
  ASSERT_TRUE(h);
  EXPECT_DOUBLE_EQ(*h, 30.0);
  EXPECT_FALSE(gtfs::stop_average_headway(feed, "S1", ymd(2024, 1, 6), ymd(2024, 1, 6), 0, 86400));
  const auto h3 = gtfs::stop_average_headway(feed, "S3", ymd(2024, 1, 8), ymd(2024, 1, 8), 9 * 3600, 11 * 3600);
  ASSERT_TRUE(h3);
  EXPECT_DOUBLE_EQ(*h3, 15.0);
  EXPECT_THROW(gtfs::stop_average_headway(feed, "nope", ymd(2024, 1, 8), ymd(2024, 1, 8), 0, 3600), Error);
  EXPECT_THROW(gtfs::stop_average_headway(feed, "S1", ymd(2024, 1, 8), ymd(2024, 1, 8), 0, 90000), Error);
}

TEST(Gtfs, StopsInsideRegionBecomePois) {
  const auto feed = gtfs::load_feed(kGtfsZip);
  const UtmZone zone{35, false};
  Box b;
  for (const char* id : {"S1", "S2", "S3"}) {
    const auto& s = feed.stops[*feed.stop_index(id)];
    b.extend(project(LatLon{s.lat, s.lon}, zone));
  }
  const BufferedRegion region({rectangle(b.inflated(200))}, 100);
  gtfs::StopPoiStats stats;
  const auto set = gtfs::stops_as_pois(feed, region, zone, &stats);
  EXPECT_EQ(set.destination_class, "pt_any");
  EXPECT_EQ(set.points.size(), 3u);
  EXPECT_EQ(stats.outside_region, 1u);
  EXPECT_EQ(set.points[0].source_id, "gtfs:S1");
  EXPECT_TRUE(gtfs::stops_as_pois(gtfs::Feed{}, region, zone).points.empty());
}

TEST(Gtfs, MergeKeepsOsmPointWithinTenMeters) {
  PoiSet osm{"pt_any", {{"n1", {100, 100}, {}}, {"n2", {500, 500}, {}}}};
  const PoiSet extra{"pt_any", {{"gtfs:a", {103, 104}, {}}, {"gtfs:b", {300, 300}, {}}, {"gtfs:c", {500, 511}, {}}}};
  merge_pois(osm, extra);
  ASSERT_EQ(osm.points.size(), 4u);
  EXPECT_EQ(osm.points[0].source_id, "n1");
  EXPECT_EQ(osm.points[2].source_id, "gtfs:b");
  EXPECT_EQ(osm.points[3].source_id, "gtfs:c");
}

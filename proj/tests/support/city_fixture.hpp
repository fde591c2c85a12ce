// Test helper: a synthetic grid city written as a complete project directory
// (OSM XML, boundary GeoJSON, projected population grid, YAML config).
#ifndef PEDACCESS_TESTS_CITY_FIXTURE_HPP
#define PEDACCESS_TESTS_CITY_FIXTURE_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pedaccess/geometry/projection.hpp"
#include "support/osm_fixture.hpp"

namespace fixture {

struct CitySpec {
  int n = 12;               // nodes per side
  double spacing = 80.0;    // meters between grid nodes
  int pois_per_class = 6;
  double buffer_m = 400.0;  // keeps the tessellation small in tests
  std::uint64_t seed = 7;
  pedaccess::Point origin{385000.0, 6672000.0};  // UTM 35N, Helsinki latitude
  bool empty_region = false;  // add a second region with no streets
  std::string extra_config;   // appended to the top-level config keys
};

inline const pedaccess::UtmZone kCityZone{35, false};

inline long long grid_node_id(const CitySpec& s, int i, int j) { return 1000000 + static_cast<long long>(j) * s.n + i; }

inline pedaccess::Point grid_node(const CitySpec& s, int i, int j) {
  return {s.origin.x + i * s.spacing, s.origin.y + j * s.spacing};
}

inline std::string rectangle_geojson(pedaccess::Point lo, pedaccess::Point hi) {
  std::ostringstream os;
  os.precision(12);
  os << R"({"type":"FeatureCollection","features":[{"type":"Feature","properties":{},"geometry":{"type":"Polygon","coordinates":[[)";
  const pedaccess::Point ring[] = {lo, {hi.x, lo.y}, hi, {lo.x, hi.y}, lo};
  for (int k = 0; k < 5; ++k) {
    const auto ll = pedaccess::unproject(ring[k], kCityZone);
    os << (k ? "," : "") << "[" << ll.lon << "," << ll.lat << "]";
  }
  os << "]]}}]}\n";
  return os.str();
}

/// Writes the project into `dir` and returns the config path.
inline std::filesystem::path write_city(const std::filesystem::path& dir, const CitySpec& s) {
  std::filesystem::create_directories(dir);
  OsmXml x(kCityZone);
  for (int j = 0; j < s.n; ++j)
    for (int i = 0; i < s.n; ++i) x.node(grid_node_id(s, i, j), grid_node(s, i, j));

  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> u(0.0, (s.n - 1) * s.spacing);
  const KV classes[] = {{{"shop", "supermarket"}}, {{"shop", "convenience"}}, {{"highway", "bus_stop"}},
                        {{"leisure", "park"}}};
  long long pid = 9000000;
  for (const KV& tags : classes)
    for (int k = 0; k < s.pois_per_class; ++k) x.node(pid++, {s.origin.x + u(rng), s.origin.y + u(rng)}, tags);

  long long wid = 1;
  for (int j = 0; j < s.n; ++j) {
    std::vector<long long> refs;
    for (int i = 0; i < s.n; ++i) refs.push_back(grid_node_id(s, i, j));
    x.way(wid++, refs, {{"highway", "residential"}});
  }
  for (int i = 0; i < s.n; ++i) {
    std::vector<long long> refs;
    for (int j = 0; j < s.n; ++j) refs.push_back(grid_node_id(s, i, j));
    x.way(wid++, refs, {{"highway", i % 3 == 0 ? "footway" : "residential"}});
  }
  x.write(dir / "city.osm");

  const double side = (s.n - 1) * s.spacing;
  const pedaccess::Point lo{s.origin.x - 1.0, s.origin.y - 1.0}, hi{s.origin.x + side + 1.0, s.origin.y + side + 1.0};
  std::ofstream(dir / "boundary.geojson") << rectangle_geojson(lo, hi);
  const pedaccess::Point far{hi.x + 20000.0, lo.y};
  if (s.empty_region)
    std::ofstream(dir / "empty_boundary.geojson") << rectangle_geojson(far, {far.x + 500.0, far.y + 500.0});

  // Population grid: 100 m cells over the buffered city, with an empty south-west block.
  const double cell = 100.0;
  const double x0 = std::floor((lo.x - s.buffer_m - 500.0) / cell) * cell;
  const double y0 = std::floor((lo.y - s.buffer_m - 500.0) / cell) * cell;
  const int ncols = static_cast<int>(std::ceil((hi.x + s.buffer_m + 500.0 - x0) / cell));
  const int nrows = static_cast<int>(std::ceil((hi.y + s.buffer_m + 500.0 - y0) / cell));
  {
    std::ofstream r(dir / "population.asc");
    r.precision(12);
    r << "ncols " << ncols << "\nnrows " << nrows << "\nxllcorner " << x0 << "\nyllcorner " << y0 << "\ncellsize "
      << cell << "\nNODATA_value -9999\n";
    for (int row = 0; row < nrows; ++row) {
      for (int c = 0; c < ncols; ++c) {
        const double cx = x0 + (c + 0.5) * cell, cy = y0 + (nrows - row - 0.5) * cell;
        const bool empty = cx < s.origin.x + side * 0.2 && cy < s.origin.y + side * 0.2;
        r << (c ? " " : "") << (empty ? 0 : 10 + (c * 7 + row * 13) % 50);
      }
      r << "\n";
    }
  }

  std::ofstream cfg(dir / "project.yaml");
  cfg << "output_dir: out\nbuffer_m: " << s.buffer_m << "\n" << s.extra_config;
  cfg << "regions:\n"
         "  - name: city\n"
         "    boundary_files: [boundary.geojson]\n"
         "    osm_file: city.osm\n"
         "    population_raster: population.asc\n"
         "    utm_zone: 35\n";
  if (s.empty_region)
    cfg << "  - name: empty\n"
           "    boundary_files: [empty_boundary.geojson]\n"
           "    osm_file: city.osm\n"
           "    population_raster: population.asc\n"
           "    utm_zone: 35\n";
  return dir / "project.yaml";
}

}  // namespace fixture

#endif  // PEDACCESS_TESTS_CITY_FIXTURE_HPP

// Walking distance to the nearest supermarket from points along every street of an OSM
// extract, using the library directly instead of the staged pipeline.
//
//   nearest_supermarket data/helsinki_center.osm 60.166 24.938 60.176 24.951
#include <cstdlib>
#include <iostream>

#include "pedaccess/indicators/estimates.hpp"
#include "pedaccess/indicators/sample_points.hpp"
#include "pedaccess/network/accessibility.hpp"
#include "pedaccess/osm/pedestrian_graph.hpp"
#include "pedaccess/osm/pois.hpp"
#include "pedaccess/osm/reader.hpp"

using namespace pedaccess;

int main(int argc, char** argv) {
  if (argc != 6) {
    std::cerr << "usage: " << argv[0] << " <extract.osm|.pbf> <south> <west> <north> <east>\n";
    return 2;
  }
  const LatLon sw{std::atof(argv[2]), std::atof(argv[3])}, ne{std::atof(argv[4]), std::atof(argv[5])};
  const UtmZone zone = utm_zone_for(LatLon{(sw.lat + ne.lat) / 2, (sw.lon + ne.lon) / 2});
  const Point lo = project(sw, zone), hi = project(ne, zone);

  try {
    const osm::Data data = osm::load_osm(argv[1]);
    const BufferedRegion region({rectangle(Box{lo.x, lo.y, hi.x, hi.y})}, 500.0);
    const PedestrianGraph g = build_pedestrian_graph(data, region, zone);
    const auto pois = extract_pois(data, {{"supermarket", {{"shop", "supermarket"}}}}, region, zone);
    const NodeDistanceField field = nearest_destination_field(g, NodeSnapper(g, 500.0), pois.front(), 1600.0);

    std::size_t reached = 0, within = 0;
    const auto points = restrict_to_region(generate_sample_points(g, 30.0), region);
    for (const SamplePoint& sp : points) {
      const auto d = sample_access_distance(sp, g, field).value();
      if (!d) continue;
      ++reached;
      if (*d <= 500.0) ++within;
    }
    std::cout << g.node_count() << " nodes, " << pois.front().points.size() << " supermarkets, " << points.size()
              << " sample points\n"
              << reached << " reach one within 1600 m, " << within << " within 500 m\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

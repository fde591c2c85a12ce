#ifndef PEDACCESS_AUXDATA_RASTER_HPP
#define PEDACCESS_AUXDATA_RASTER_HPP

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pedaccess/error.hpp"
#include "pedaccess/geometry/hexgrid.hpp"
#include "pedaccess/geometry/polygon.hpp"
#include "pedaccess/geometry/projection.hpp"

namespace pedaccess {

/// Population counts per grid cell. Row 0 is the northernmost row, as in the file.
struct PopulationRaster {
  int ncols = 0;
  int nrows = 0;
  double xll = 0.0;  // lower-left corner of the lower-left cell
  double yll = 0.0;
  double cellsize = 0.0;
  std::optional<double> nodata;
  std::vector<double> values;
  /// Set when coordinates are WGS84 degrees (x = lon, y = lat) rather than the region frame.
  std::optional<UtmZone> geographic;
  std::size_t nodata_cells = 0;

  bool is_nodata(int col, int row) const {
    return nodata && values[static_cast<std::size_t>(row) * ncols + col] == *nodata;
  }
  /// Persons in the cell; NODATA reads as 0.
  double value(int col, int row) const {
    return is_nodata(col, row) ? 0.0 : values[static_cast<std::size_t>(row) * ncols + col];
  }

  Point native_center(int col, int row) const {
    return {xll + (col + 0.5) * cellsize, yll + (nrows - row - 0.5) * cellsize};
  }
  Point to_frame(Point native) const {
    return geographic ? project(LatLon{native.y, native.x}, *geographic) : native;
  }
  Point center(int col, int row) const { return to_frame(native_center(col, row)); }
  std::array<Point, 4> corners(int col, int row) const {
    const double x0 = xll + col * cellsize, y0 = yll + (nrows - row - 1) * cellsize;
    return {to_frame({x0, y0}), to_frame({x0 + cellsize, y0}), to_frame({x0 + cellsize, y0 + cellsize}),
            to_frame({x0, y0 + cellsize})};
  }

  struct CellRange {
    int col0, col1, row0, row1;  // inclusive; empty when col0 > col1
  };

  /// Cells whose footprint may touch the projected box (padded by one cell).
  CellRange cells_covering(const Box& box) const {
    Box native;
    if (geographic) {
      for (double fx : {0.0, 0.5, 1.0})
        for (double fy : {0.0, 0.5, 1.0}) {
          const LatLon ll = unproject({box.min_x + fx * box.width(), box.min_y + fy * box.height()}, *geographic);
          native.extend(Point{ll.lon, ll.lat});
        }
    } else {
      native = box;
    }
    const int c0 = static_cast<int>(std::floor((native.min_x - xll) / cellsize)) - 1;
    const int c1 = static_cast<int>(std::floor((native.max_x - xll) / cellsize)) + 1;
    const int r_from_bottom0 = static_cast<int>(std::floor((native.min_y - yll) / cellsize)) - 1;
    const int r_from_bottom1 = static_cast<int>(std::floor((native.max_y - yll) / cellsize)) + 1;
    CellRange r{std::max(c0, 0), std::min(c1, ncols - 1), std::max(nrows - 1 - r_from_bottom1, 0),
                std::min(nrows - 1 - r_from_bottom0, nrows - 1)};
    return r;
  }
};

/// Reads an ESRI ASCII grid (.asc).
inline PopulationRaster read_ascii_grid(std::istream& in, const std::string& name = "<stream>") {
  PopulationRaster r;
  std::map<std::string, std::string> header;
  std::string line;
  std::streampos data_start = in.tellg();
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key, val;
    ls >> key;
    if (key.empty()) {
      data_start = in.tellg();
      continue;
    }
    if (!std::isalpha(static_cast<unsigned char>(key[0]))) break;
    if (!(ls >> val)) throw ParseError("malformed raster header line '" + line + "' in " + name);
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
    header[key] = val;
    data_start = in.tellg();
  }
  auto num = [&](const std::string& key) -> std::optional<double> {
    auto it = header.find(key);
    if (it == header.end()) return std::nullopt;
    try {
      std::size_t used = 0;
      const double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw ParseError("");
      return v;
    } catch (const std::exception&) {
      throw ParseError("malformed raster header value for " + key + " in " + name);
    }
  };
  auto need = [&](const std::string& key) {
    auto v = num(key);
    if (!v) throw ParseError("raster header missing " + key + " in " + name);
    return *v;
  };
  r.ncols = static_cast<int>(need("ncols"));
  r.nrows = static_cast<int>(need("nrows"));
  r.cellsize = need("cellsize");
  if (r.ncols <= 0 || r.nrows <= 0 || !(r.cellsize > 0)) throw ParseError("raster dimensions must be positive in " + name);
  if (auto x = num("xllcorner")) {
    r.xll = *x;
  } else if (auto xc = num("xllcenter")) {
    r.xll = *xc - r.cellsize / 2;
  } else {
    throw ParseError("raster header missing xllcorner in " + name);
  }
  if (auto y = num("yllcorner")) {
    r.yll = *y;
  } else if (auto yc = num("yllcenter")) {
    r.yll = *yc - r.cellsize / 2;
  } else {
    throw ParseError("raster header missing yllcorner in " + name);
  }
  r.nodata = num("nodata_value");

  in.clear();
  in.seekg(data_start);
  r.values.reserve(static_cast<std::size_t>(r.ncols) * r.nrows);
  int row = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::size_t before = r.values.size();
    double v;
    while (ls >> v) r.values.push_back(v);
    if (!ls.eof()) throw ParseError("non-numeric raster value in row " + std::to_string(row) + " of " + name);
    const std::size_t got = r.values.size() - before;
    if (got == 0) continue;
    if (got != static_cast<std::size_t>(r.ncols))
      throw ParseError("raster row " + std::to_string(row) + " has " + std::to_string(got) + " values, expected " +
                       std::to_string(r.ncols) + " in " + name);
    ++row;
  }
  if (row != r.nrows) throw ParseError("raster has " + std::to_string(row) + " rows, expected " + std::to_string(r.nrows));
  for (double v : r.values) {
    if (r.nodata && v == *r.nodata) {
      ++r.nodata_cells;
    } else if (v < 0) {
      throw ParseError("negative population value in " + name);
    }
  }
  return r;
}

inline PopulationRaster read_raster(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open raster: " + path.string());
  return read_ascii_grid(in, path.string());
}

namespace detail {

// Closed point-in-hexagon test from the cell's own geometry (flat-top).
inline bool hex_contains_point(const HexCell& cell, Point p, double eps = 1e-9) {
  const double a = std::numbers::sqrt3 / 2.0 * distance(cell.center, cell.vertices[0]) + eps;
  const Point d = p - cell.center;
  if (std::abs(d.y) > a) return false;
  const double s = std::numbers::sqrt3 / 2.0;
  return std::abs(0.5 * d.y + s * d.x) <= a && std::abs(0.5 * d.y - s * d.x) <= a;
}

}  // namespace detail

/// Mean population of raster cells whose centers fall inside the hexagon; if none,
/// of cells whose footprint overlaps it; otherwise 0.
inline double hex_population(const PopulationRaster& raster, const HexCell& cell) {
  const auto rng = raster.cells_covering(bounding_box(cell.polygon()));
  double sum = 0;
  std::size_t n = 0;
  for (int row = rng.row0; row <= rng.row1; ++row)
    for (int col = rng.col0; col <= rng.col1; ++col)
      if (detail::hex_contains_point(cell, raster.center(col, row))) sum += raster.value(col, row), ++n;
  if (n > 0) return sum / static_cast<double>(n);
  const std::span<const Point> hv(cell.vertices.data(), cell.vertices.size());
  for (int row = rng.row0; row <= rng.row1; ++row)
    for (int col = rng.col0; col <= rng.col1; ++col) {
      const auto q = raster.corners(col, row);
      if (convex_overlap(hv, q)) sum += raster.value(col, row), ++n;
    }
  return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

/// hex_population for every cell of the grid, in id order.
inline std::vector<double> hex_populations(const PopulationRaster& raster, const HexGrid& grid) {
  std::vector<double> sum(grid.size(), 0.0);
  std::vector<std::size_t> count(grid.size(), 0);
  if (grid.size() == 0) return sum;
  Box all;
  for (const HexCell& c : grid.cells()) all.extend(bounding_box(c.polygon()));
  const auto rng = raster.cells_covering(all);
  for (int row = rng.row0; row <= rng.row1; ++row)
    for (int col = rng.col0; col <= rng.col1; ++col) {
      const Point p = raster.center(col, row);
      const auto id = grid.locate(p);
      if (!id) continue;
      // A center on a shared edge belongs to every hexagon touching it.
      const HexCell& home = grid[*id];
      for (int dc = -1; dc <= 1; ++dc)
        for (int dr = -1; dr <= 1; ++dr) {
          const auto nb = grid.id_at(home.col + dc, home.row + dr);
          if (!nb || !detail::hex_contains_point(grid[*nb], p)) continue;
          sum[*nb] += raster.value(col, row);
          ++count[*nb];
        }
    }
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i)
    out[i] = count[i] > 0 ? sum[i] / static_cast<double>(count[i]) : hex_population(raster, grid.cells()[i]);
  return out;
}

/// Sum of raster cells whose centers fall inside the region.
inline double region_population(const PopulationRaster& raster, const std::vector<Polygon>& region) {
  if (region.empty()) return 0.0;
  const auto rng = raster.cells_covering(bounding_box(region));
  double sum = 0;
  for (int row = rng.row0; row <= rng.row1; ++row)
    for (int col = rng.col0; col <= rng.col1; ++col)
      if (contains(region, raster.center(col, row))) sum += raster.value(col, row);
  return sum;
}

}  // namespace pedaccess

#endif  // PEDACCESS_AUXDATA_RASTER_HPP

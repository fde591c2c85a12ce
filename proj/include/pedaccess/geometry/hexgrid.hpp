#ifndef PEDACCESS_GEOMETRY_HEXGRID_HPP
#define PEDACCESS_GEOMETRY_HEXGRID_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "pedaccess/error.hpp"
#include "pedaccess/geometry/point.hpp"
#include "pedaccess/geometry/polygon.hpp"

namespace pedaccess {

/// Area of a regular hexagon with long (vertex-to-vertex) diagonal d, in m².
inline double hexagon_area(double diagonal) { return 3.0 * std::numbers::sqrt3 / 8.0 * diagonal * diagonal; }

struct HexCell {
  std::int64_t id = 0;
  int col = 0;
  int row = 0;
  Point center;
  std::array<Point, 6> vertices{};
  double area_km2 = 0.0;
  double population = 0.0;
  double pop_density = 0.0;
  std::int64_t intersection_count = 0;
  double intersection_density = 0.0;

  Polygon polygon() const {
    Polygon p;
    p.outer.assign(vertices.begin(), vertices.end());
    p.outer.push_back(vertices.front());
    return p;
  }

  void set_population(double persons) {
    population = persons;
    pop_density = area_km2 > 0 ? persons / area_km2 : 0.0;
  }
  void set_intersections(std::int64_t count) {
    intersection_count = count;
    intersection_density = area_km2 > 0 ? static_cast<double>(count) / area_km2 : 0.0;
  }
};

/// Flat-top hexagonal tessellation anchored at the projected origin.
///
/// Column c, row r has center (1.5·R·c, √3·R·(r + (c odd ? ½ : 0))) with R half the
/// long diagonal, so grids built over overlapping boxes share cell geometry. Cell ids
/// are assigned row-major over (row, col) within the tessellated box.
class HexGrid {
 public:
  HexGrid() = default;

  HexGrid(const Box& bbox, double diagonal) : diagonal_(diagonal) {
    if (!(diagonal > 0)) throw Error("hex diagonal must be positive");
    if (bbox.empty() || !(bbox.width() >= 0) || !(bbox.height() >= 0)) throw Error("hex bbox is degenerate");
    const double R = radius();
    const double h = std::numbers::sqrt3 * R;
    col_min_ = static_cast<int>(std::floor((bbox.min_x - R) / (1.5 * R))) - 1;
    col_max_ = static_cast<int>(std::ceil((bbox.max_x + R) / (1.5 * R))) + 1;
    row_min_ = static_cast<int>(std::floor((bbox.min_y - h) / h)) - 1;
    row_max_ = static_cast<int>(std::ceil((bbox.max_y + h) / h)) + 1;
    const double cell_area_km2 = hexagon_area(diagonal) * 1e-6;
    lookup_.assign(static_cast<std::size_t>(ncols()) * static_cast<std::size_t>(nrows()), -1);
    for (int r = row_min_; r <= row_max_; ++r)
      for (int c = col_min_; c <= col_max_; ++c) {
        const Point ctr = center_of(c, r);
        if (!overlaps_box(ctr, bbox)) continue;
        HexCell cell;
        cell.id = static_cast<std::int64_t>(cells_.size());
        cell.col = c;
        cell.row = r;
        cell.center = ctr;
        for (int k = 0; k < 6; ++k) {
          const double ang = std::numbers::pi / 3.0 * k;
          cell.vertices[k] = {ctr.x + R * std::cos(ang), ctr.y + R * std::sin(ang)};
        }
        cell.area_km2 = cell_area_km2;
        lookup_[slot(c, r)] = cell.id;
        cells_.push_back(cell);
      }
  }

  double diagonal() const { return diagonal_; }
  double radius() const { return diagonal_ / 2.0; }
  double apothem() const { return std::numbers::sqrt3 / 2.0 * radius(); }

  const std::vector<HexCell>& cells() const { return cells_; }
  std::vector<HexCell>& cells() { return cells_; }
  std::size_t size() const { return cells_.size(); }
  const HexCell& operator[](std::int64_t id) const { return cells_.at(static_cast<std::size_t>(id)); }
  HexCell& operator[](std::int64_t id) { return cells_.at(static_cast<std::size_t>(id)); }

  Point center_of(int col, int row) const {
    const double R = radius();
    const double h = std::numbers::sqrt3 * R;
    return {1.5 * R * col, h * (row + ((col & 1) ? 0.5 : 0.0))};
  }

  /// Closed point-in-hexagon test for a cell center.
  bool hex_contains(Point center, Point p, double eps = 1e-9) const {
    const Point d = p - center;
    const double a = apothem() + eps;
    if (std::abs(d.y) > a) return false;
    const double s = std::numbers::sqrt3 / 2.0;
    if (std::abs(0.5 * d.y + s * d.x) > a) return false;
    if (std::abs(0.5 * d.y - s * d.x) > a) return false;
    return true;
  }

  /// Id of the cell containing p; on shared edges the lowest id wins.
  std::optional<std::int64_t> locate(Point p) const {
    if (cells_.empty()) return std::nullopt;
    const auto [c0, r0] = round_to_cell(p);
    std::optional<std::int64_t> best;
    auto consider = [&](int c, int r) {
      const auto id = id_at(c, r);
      if (!id || (best && *best <= *id)) return;
      if (hex_contains(center_of(c, r), p)) best = id;
    };
    consider(c0, r0);
    for (int dc = -1; dc <= 1; ++dc)
      for (int dr = -1; dr <= 1; ++dr)
        if (dc != 0 || dr != 0) consider(c0 + dc, r0 + dr);
    return best;
  }

  std::optional<std::int64_t> id_at(int col, int row) const {
    if (col < col_min_ || col > col_max_ || row < row_min_ || row > row_max_) return std::nullopt;
    const std::int64_t id = lookup_[slot(col, row)];
    if (id < 0) return std::nullopt;
    return id;
  }

 private:
  int ncols() const { return col_max_ - col_min_ + 1; }
  int nrows() const { return row_max_ - row_min_ + 1; }
  std::size_t slot(int c, int r) const {
    return static_cast<std::size_t>(r - row_min_) * static_cast<std::size_t>(ncols()) +
           static_cast<std::size_t>(c - col_min_);
  }

  // Positive-area overlap of the hexagon at ctr with the box (separating axis test).
  bool overlaps_box(Point ctr, const Box& b) const {
    const double R = radius();
    const double a = apothem();
    if (ctr.x - R >= b.max_x || ctr.x + R <= b.min_x) return false;
    if (ctr.y - a >= b.max_y || ctr.y + a <= b.min_y) return false;
    if (b.width() == 0 || b.height() == 0) {
      // Degenerate box: accept cells whose closed hexagon touches it.
      return hex_contains(ctr, {std::clamp(ctr.x, b.min_x, b.max_x), std::clamp(ctr.y, b.min_y, b.max_y)});
    }
    const double s = std::numbers::sqrt3 / 2.0;
    const std::array<Point, 2> normals{Point{s, 0.5}, Point{-s, 0.5}};
    const std::array<Point, 4> corners{Point{b.min_x, b.min_y}, Point{b.max_x, b.min_y}, Point{b.max_x, b.max_y},
                                       Point{b.min_x, b.max_y}};
    for (const Point& n : normals) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (const Point& c : corners) {
        const double v = dot(c - ctr, n);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (lo >= a || hi <= -a) return false;
    }
    return true;
  }

  std::pair<int, int> round_to_cell(Point p) const {
    const double R = radius();
    const double q = (2.0 / 3.0 * p.x) / R;
    const double r = (-1.0 / 3.0 * p.x + std::numbers::sqrt3 / 3.0 * p.y) / R;
    const double s = -q - r;
    double rq = std::round(q), rr = std::round(r), rs = std::round(s);
    const double dq = std::abs(rq - q), dr = std::abs(rr - r), ds = std::abs(rs - s);
    if (dq > dr && dq > ds)
      rq = -rr - rs;
    else if (dr > ds)
      rr = -rq - rs;
    const int col = static_cast<int>(rq);
    const int axial_r = static_cast<int>(rr);
    const int row = axial_r + (col - (col & 1)) / 2;
    return {col, row};
  }

  double diagonal_ = 0.0;
  int col_min_ = 0, col_max_ = -1, row_min_ = 0, row_max_ = -1;
  std::vector<std::int64_t> lookup_;
  std::vector<HexCell> cells_;
};

/// Tessellates the box with flat-top hexagons of the given long diagonal.
inline std::vector<HexCell> hex_tessellate(const Box& bbox, double diagonal) {
  return HexGrid(bbox, diagonal).cells();
}

}  // namespace pedaccess

#endif  // PEDACCESS_GEOMETRY_HEXGRID_HPP

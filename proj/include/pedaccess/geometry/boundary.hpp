#ifndef PEDACCESS_GEOMETRY_BOUNDARY_HPP
#define PEDACCESS_GEOMETRY_BOUNDARY_HPP

#include <vector>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>

#include "pedaccess/geometry/grid_index.hpp"
#include "pedaccess/geometry/polygon.hpp"

namespace pedaccess {

/// True iff p lies inside the polygon or within `buffer` meters of its boundary.
inline bool in_buffered_region(Point p, const Polygon& region, double buffer) {
  if (buffer < 0) throw Error("buffer must be non-negative");
  if (!bounding_box(region).inflated(buffer + 1e-9).contains(p)) return false;
  if (contains(region, p)) return true;
  return boundary_distance(p, region) <= buffer;
}

/// Precomputed membership test for a (multi)polygon study region with a buffer.
/// Same predicate as in_buffered_region, indexed for bulk queries.
class BufferedRegion {
 public:
  BufferedRegion(std::vector<Polygon> parts, double buffer)
      : parts_(std::move(parts)), buffer_(buffer), edges_(cell_size_for(buffer)) {
    if (buffer < 0) throw Error("buffer must be non-negative");
    for (const Polygon& poly : parts_) {
      extent_.extend(bounding_box(poly));
      add_ring(poly.outer);
      for (const Ring& h : poly.holes) add_ring(h);
    }
  }

  const std::vector<Polygon>& parts() const { return parts_; }
  double buffer() const { return buffer_; }
  Box extent() const { return extent_; }
  Box buffered_extent() const { return extent_.inflated(buffer_); }

  bool contains(Point p) const {
    if (!buffered_extent().inflated(1e-9).contains(p)) return false;
    if (edges_.empty()) return false;
    if (nearest_within(edges_, p, buffer_ + 1e-9)) return true;
    return pedaccess::contains(parts_, p);
  }

  /// Unbuffered membership.
  bool contains_core(Point p) const { return pedaccess::contains(parts_, p); }

  double area() const { return pedaccess::area(parts_); }

 private:
  static double cell_size_for(double buffer) { return std::max(buffer, 50.0); }

  void add_ring(const Ring& r) {
    for (std::size_t i = 1; i < r.size(); ++i) edges_.insert(Segment{r[i - 1], r[i]});
  }

  std::vector<Polygon> parts_;
  double buffer_;
  Box extent_;
  GridIndex<Segment> edges_;
};

namespace detail {

namespace bg = boost::geometry;
using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint, false, true>;  // counter-clockwise, closed
using BgMulti = bg::model::multi_polygon<BgPolygon>;

inline BgPolygon to_bg(const Polygon& poly) {
  Polygon p = poly;
  normalize(p);
  BgPolygon out;
  for (const Point& q : p.outer) out.outer().emplace_back(q.x, q.y);
  for (const Ring& h : p.holes) {
    out.inners().emplace_back();
    for (const Point& q : h) out.inners().back().emplace_back(q.x, q.y);
  }
  return out;
}

inline Polygon from_bg(const BgPolygon& poly) {
  Polygon out;
  for (const auto& q : poly.outer()) out.outer.push_back({q.x(), q.y()});
  for (const auto& inner : poly.inners()) {
    out.holes.emplace_back();
    for (const auto& q : inner) out.holes.back().push_back({q.x(), q.y()});
  }
  normalize(out);
  return out;
}

}  // namespace detail

/// a ∩ b as a set of polygons; empty when disjoint. Throws Error on invalid rings.
inline std::vector<Polygon> polygon_intersection(const Polygon& a, const Polygon& b) {
  validate(a);
  validate(b);
  detail::BgMulti result;
  boost::geometry::intersection(detail::to_bg(a), detail::to_bg(b), result);
  std::vector<Polygon> out;
  for (const auto& p : result) {
    Polygon q = detail::from_bg(p);
    if (q.outer.size() >= 4 && area(q) > 0) out.push_back(std::move(q));
  }
  return out;
}

/// Pairwise intersection of two multipolygons, concatenated.
inline std::vector<Polygon> polygon_intersection(const std::vector<Polygon>& a, const std::vector<Polygon>& b) {
  std::vector<Polygon> out;
  for (const Polygon& pa : a)
    for (const Polygon& pb : b) {
      if (!bounding_box(pa).intersects(bounding_box(pb))) continue;
      auto part = polygon_intersection(pa, pb);
      out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
  return out;
}

}  // namespace pedaccess

#endif  // PEDACCESS_GEOMETRY_BOUNDARY_HPP

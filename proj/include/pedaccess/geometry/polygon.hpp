#ifndef PEDACCESS_GEOMETRY_POLYGON_HPP
#define PEDACCESS_GEOMETRY_POLYGON_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "pedaccess/error.hpp"
#include "pedaccess/geometry/point.hpp"

namespace pedaccess {

/// Closed ring: first vertex repeated as the last.
using Ring = std::vector<Point>;

struct Polygon {
  Ring outer;
  std::vector<Ring> holes;
};

/// Shoelace signed area; positive for counter-clockwise rings.
inline double signed_area(const Ring& ring) {
  double s = 0.0;
  for (std::size_t i = 1; i < ring.size(); ++i) s += cross(ring[i - 1], ring[i]);
  if (!ring.empty() && !(ring.front() == ring.back())) s += cross(ring.back(), ring.front());
  return 0.5 * s;
}

inline double area(const Polygon& poly) {
  double a = std::abs(signed_area(poly.outer));
  for (const Ring& h : poly.holes) a -= std::abs(signed_area(h));
  return a;
}

inline double area(const std::vector<Polygon>& polys) {
  double a = 0.0;
  for (const Polygon& p : polys) a += area(p);
  return a;
}

inline Box bounding_box(const Polygon& poly) { return bounding_box(std::span<const Point>(poly.outer)); }

inline Box bounding_box(const std::vector<Polygon>& polys) {
  Box b;
  for (const Polygon& p : polys) b.extend(bounding_box(p));
  return b;
}

/// Area-weighted centroid of a ring; falls back to the vertex mean when degenerate.
inline Point centroid(const Ring& ring) {
  if (ring.empty()) return {};
  const Point o = ring.front();
  double a2 = 0.0, cx = 0.0, cy = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = ring[i] - o;
    const Point q = ring[(i + 1) % n] - o;
    const double c = cross(p, q);
    a2 += c;
    cx += (p.x + q.x) * c;
    cy += (p.y + q.y) * c;
  }
  if (std::abs(a2) < 1e-12) {
    Point m{};
    const std::size_t k = (n > 1 && ring.front() == ring.back()) ? n - 1 : n;
    for (std::size_t i = 0; i < k; ++i) m = m + ring[i];
    return (1.0 / static_cast<double>(k)) * m;
  }
  return o + Point{cx / (3.0 * a2), cy / (3.0 * a2)};
}

inline void close_ring(Ring& ring) {
  if (!ring.empty() && !(ring.front() == ring.back())) ring.push_back(ring.front());
}

/// Closes rings and orients the exterior counter-clockwise, holes clockwise.
inline void normalize(Polygon& poly) {
  close_ring(poly.outer);
  if (signed_area(poly.outer) < 0) std::reverse(poly.outer.begin(), poly.outer.end());
  for (Ring& h : poly.holes) {
    close_ring(h);
    if (signed_area(h) > 0) std::reverse(h.begin(), h.end());
  }
}

namespace detail {

inline bool segments_cross(Point a, Point b, Point c, Point d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

inline void validate_ring(const Ring& ring, const char* what) {
  if (ring.size() < 4) throw Error(std::string("invalid ring: ") + what + " has fewer than 4 vertices");
  if (!(ring.front() == ring.back())) throw Error(std::string("invalid ring: ") + what + " is not closed");
  for (const Point& p : ring)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error("invalid ring: non-finite coordinate");
}

}  // namespace detail

/// Throws Error when a ring is open, too short, or the exterior self-intersects.
inline void validate(const Polygon& poly) {
  detail::validate_ring(poly.outer, "exterior");
  for (const Ring& h : poly.holes) detail::validate_ring(h, "hole");
  const Ring& r = poly.outer;
  const std::size_t n = r.size() - 1;
  if (n > 4000) return;  // quadratic check skipped for very large boundaries
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (detail::segments_cross(r[i], r[i + 1], r[j], r[j + 1]))
        throw Error("invalid ring: exterior self-intersects");
    }
}

/// Distance from p to the nearest ring edge of the polygon (exterior and holes).
inline double boundary_distance(Point p, const Polygon& poly) {
  double best = polyline_distance(p, poly.outer);
  for (const Ring& h : poly.holes) best = std::min(best, polyline_distance(p, h));
  return best;
}

namespace detail {

inline bool ring_crossings_odd(Point p, const Ring& ring) {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const Point a = ring[i];
    const Point b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace detail

/// Even-odd containment; points on any ring count as inside.
inline bool contains(const Polygon& poly, Point p, double boundary_eps = 1e-9) {
  if (poly.outer.empty()) return false;
  if (!bounding_box(poly).inflated(boundary_eps).contains(p)) return false;
  if (boundary_distance(p, poly) <= boundary_eps) return true;
  bool inside = detail::ring_crossings_odd(p, poly.outer);
  for (const Ring& h : poly.holes)
    if (detail::ring_crossings_odd(p, h)) inside = !inside;
  return inside;
}

inline bool contains(const std::vector<Polygon>& polys, Point p) {
  return std::any_of(polys.begin(), polys.end(), [&](const Polygon& poly) { return contains(poly, p); });
}

/// Axis-aligned rectangle as a counter-clockwise polygon.
inline Polygon rectangle(const Box& b) {
  return Polygon{{{b.min_x, b.min_y}, {b.max_x, b.min_y}, {b.max_x, b.max_y}, {b.min_x, b.max_y}, {b.min_x, b.min_y}},
                 {}};
}

/// Positive-area overlap of two convex polygons given as open or closed vertex lists.
inline bool convex_overlap(std::span<const Point> a, std::span<const Point> b) {
  auto separated_along_edges_of = [](std::span<const Point> p, std::span<const Point> q) {
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point e = p[(i + 1) % n] - p[i];
      if (e.x == 0 && e.y == 0) continue;
      const Point axis{-e.y, e.x};
      double lo_p = std::numeric_limits<double>::infinity(), hi_p = -lo_p, lo_q = lo_p, hi_q = -lo_p;
      for (const Point& v : p) lo_p = std::min(lo_p, dot(v, axis)), hi_p = std::max(hi_p, dot(v, axis));
      for (const Point& v : q) lo_q = std::min(lo_q, dot(v, axis)), hi_q = std::max(hi_q, dot(v, axis));
      if (hi_p <= lo_q || hi_q <= lo_p) return true;
    }
    return false;
  };
  return !separated_along_edges_of(a, b) && !separated_along_edges_of(b, a);
}

}  // namespace pedaccess

#endif  // PEDACCESS_GEOMETRY_POLYGON_HPP

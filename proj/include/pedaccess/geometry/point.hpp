#ifndef PEDACCESS_GEOMETRY_POINT_HPP
#define PEDACCESS_GEOMETRY_POINT_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace pedaccess {

/// Geographic coordinate in WGS84 degrees.
struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

/// Planar point in a projected frame, meters.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline double squared_distance(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// Euclidean distance from p to the closed segment [a, b].
inline double segment_distance(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

struct Box {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  bool empty() const { return min_x > max_x || min_y > max_y; }
  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }

  void extend(Point p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  void extend(const Box& b) {
    if (b.empty()) return;
    extend(Point{b.min_x, b.min_y});
    extend(Point{b.max_x, b.max_y});
  }
  Box inflated(double r) const { return {min_x - r, min_y - r, max_x + r, max_y + r}; }
  bool contains(Point p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
  bool intersects(const Box& o) const {
    return !(o.min_x > max_x || o.max_x < min_x || o.min_y > max_y || o.max_y < min_y);
  }
};

inline Box bounding_box(std::span<const Point> pts) {
  Box b;
  for (const Point& p : pts) b.extend(p);
  return b;
}

inline double polyline_length(std::span<const Point> line) {
  double total = 0.0;
  for (std::size_t i = 1; i < line.size(); ++i) total += distance(line[i - 1], line[i]);
  return total;
}

/// Point at arc length `offset` along the polyline (clamped to its ends).
inline Point point_along(std::span<const Point> line, double offset) {
  if (line.empty()) return {};
  if (offset <= 0.0) return line.front();
  double walked = 0.0;
  for (std::size_t i = 1; i < line.size(); ++i) {
    const double seg = distance(line[i - 1], line[i]);
    if (walked + seg >= offset && seg > 0.0) {
      const double t = (offset - walked) / seg;
      return line[i - 1] + t * (line[i] - line[i - 1]);
    }
    walked += seg;
  }
  return line.back();
}

/// Minimum distance from p to any segment of the polyline.
inline double polyline_distance(Point p, std::span<const Point> line) {
  if (line.size() == 1) return distance(p, line.front());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < line.size(); ++i)
    best = std::min(best, segment_distance(p, line[i - 1], line[i]));
  return best;
}

}  // namespace pedaccess

#endif  // PEDACCESS_GEOMETRY_POINT_HPP

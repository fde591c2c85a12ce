#ifndef PEDACCESS_GEOMETRY_GRID_INDEX_HPP
#define PEDACCESS_GEOMETRY_GRID_INDEX_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "pedaccess/error.hpp"
#include "pedaccess/geometry/point.hpp"

namespace pedaccess {

struct Segment {
  Point a;
  Point b;
};

inline double element_distance(Point q, const Point& e) { return distance(q, e); }
inline double element_distance(Point q, const Segment& s) { return segment_distance(q, s.a, s.b); }

inline Box element_box(const Point& e) { return {e.x, e.y, e.x, e.y}; }
inline Box element_box(const Segment& s) {
  Box b;
  b.extend(s.a);
  b.extend(s.b);
  return b;
}

struct Neighbor {
  std::size_t id;
  double distance;
};

/// Uniform bucket grid over points or segments. Element ids are insertion indices.
template <typename Element>
class GridIndex {
 public:
  explicit GridIndex(double cell_size) : cell_(cell_size) {
    if (!(cell_size > 0)) throw Error("grid index cell size must be positive");
  }

  GridIndex(double cell_size, std::vector<Element> elements) : GridIndex(cell_size) {
    elements_.reserve(elements.size());
    for (auto& e : elements) insert(std::move(e));
  }

  std::size_t insert(Element e) {
    const std::size_t id = elements_.size();
    const Box b = element_box(e);
    extent_.extend(b);
    const auto [x0, y0] = cell_of(b.min_x, b.min_y);
    const auto [x1, y1] = cell_of(b.max_x, b.max_y);
    for (std::int64_t ix = x0; ix <= x1; ++ix)
      for (std::int64_t iy = y0; iy <= y1; ++iy) buckets_[key(ix, iy)].push_back(id);
    elements_.push_back(std::move(e));
    return id;
  }

  double cell_size() const { return cell_; }
  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  const Element& operator[](std::size_t id) const { return elements_[id]; }
  const std::vector<Element>& elements() const { return elements_; }

  /// Sorted ids whose buckets touch the square of half-width r around p.
  /// A superset of every element within r.
  std::vector<std::size_t> candidates(Point p, double r) const {
    std::vector<std::size_t> out;
    if (elements_.empty()) return out;
    Box q = Box{p.x - r, p.y - r, p.x + r, p.y + r};
    if (!q.intersects(extent_)) return out;
    q.min_x = std::max(q.min_x, extent_.min_x);
    q.min_y = std::max(q.min_y, extent_.min_y);
    q.max_x = std::min(q.max_x, extent_.max_x);
    q.max_y = std::min(q.max_y, extent_.max_y);
    const auto [x0, y0] = cell_of(q.min_x, q.min_y);
    const auto [x1, y1] = cell_of(q.max_x, q.max_y);
    for (std::int64_t ix = x0; ix <= x1; ++ix)
      for (std::int64_t iy = y0; iy <= y1; ++iy) {
        auto it = buckets_.find(key(ix, iy));
        if (it != buckets_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
      }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Exact elements within r, ordered by id.
  std::vector<Neighbor> within(Point p, double r) const {
    std::vector<Neighbor> out;
    for (std::size_t id : candidates(p, r)) {
      const double d = element_distance(p, elements_[id]);
      if (d <= r) out.push_back({id, d});
    }
    return out;
  }

 private:
  std::pair<std::int64_t, std::int64_t> cell_of(double x, double y) const {
    return {static_cast<std::int64_t>(std::floor(x / cell_)), static_cast<std::int64_t>(std::floor(y / cell_))};
  }
  static std::uint64_t key(std::int64_t ix, std::int64_t iy) {
    return (static_cast<std::uint64_t>(ix) << 32) ^ (static_cast<std::uint64_t>(iy) & 0xffffffffULL);
  }

  double cell_;
  Box extent_;
  std::vector<Element> elements_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

/// Exact nearest element within r; ties go to the lowest id.
template <typename Element>
std::optional<Neighbor> nearest_within(const GridIndex<Element>& index, Point p, double r) {
  std::optional<Neighbor> best;
  for (std::size_t id : index.candidates(p, r)) {
    const double d = element_distance(p, index[id]);
    if (d > r) continue;
    if (!best || d < best->distance) best = Neighbor{id, d};
  }
  return best;
}

/// Nearest element distance within r, or nullopt.
template <typename Element>
std::optional<double> nearest_distance(const GridIndex<Element>& index, Point p, double r) {
  auto n = nearest_within(index, p, r);
  if (!n) return std::nullopt;
  return n->distance;
}

}  // namespace pedaccess

#endif  // PEDACCESS_GEOMETRY_GRID_INDEX_HPP

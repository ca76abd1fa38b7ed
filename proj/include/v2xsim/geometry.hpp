#pragma once

#include <algorithm>
#include <cmath>

namespace v2x {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

// Axis-aligned rectangle, min/max corners.
struct Rect {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  Vec2 center() const { return {(min_x + max_x) * 0.5, (min_y + max_y) * 0.5}; }

  bool contains(const Vec2& p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }

  bool contains_rect(const Rect& r) const {
    return r.min_x >= min_x && r.max_x <= max_x && r.min_y >= min_y && r.max_y <= max_y;
  }
};

// True when the open segment a->b passes through the interior of r with
// positive chord length. A segment that only grazes the boundary (e.g. runs
// along an edge or touches a corner) does not count as an intersection, so a
// node parked flush against a building face is not classified as blocked.
inline bool segment_crosses_rect(const Vec2& a, const Vec2& b, const Rect& r) {
  const double eps = 1e-12;
  const double d[2] = {b.x - a.x, b.y - a.y};
  const double p[2] = {a.x, a.y};
  const double lo[2] = {r.min_x, r.min_y};
  const double hi[2] = {r.max_x, r.max_y};

  double t0 = 0.0;
  double t1 = 1.0;
  for (int axis = 0; axis < 2; ++axis) {
    if (std::abs(d[axis]) < eps) {
      // parallel to this slab; interior requires strict containment
      if (p[axis] <= lo[axis] || p[axis] >= hi[axis]) return false;
    } else {
      double ta = (lo[axis] - p[axis]) / d[axis];
      double tb = (hi[axis] - p[axis]) / d[axis];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 >= t1) return false;
    }
  }
  return (t1 - t0) > eps;
}

}  // namespace v2x

#pragma once

#include <array>
#include <cmath>

#include "errors.hpp"

namespace fractaldim {

// Point in R^D, D <= 2.  1D points keep c[1] == 0.
struct Point {
  int dim = 1;
  std::array<double, 2> c{0.0, 0.0};

  static Point d1(double x) { return Point{1, {x, 0.0}}; }
  static Point d2(double x, double y) { return Point{2, {x, y}}; }
  double x() const { return c[0]; }
  double y() const { return c[1]; }
  bool operator==(const Point&) const = default;
};

inline double distance(const Point& a, const Point& b) {
  const double dx = a.c[0] - b.c[0];
  const double dy = a.c[1] - b.c[1];
  return a.dim == 1 ? std::fabs(dx) : std::sqrt(dx * dx + dy * dy);
}

// Compact region V: a closed interval in 1D, a closed axis box in 2D.
// Image enclosures stay within this representation (exact for monotone 1D
// maps, conservative bounding boxes in 2D).
struct Region {
  int dim = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 0.0};

  static Region interval(double a, double b) {
    if (!(a < b)) throw ValidationError("interval: need lo < hi");
    return Region{1, {a, 0.0}, {b, 0.0}};
  }
  static Region box(double ax, double ay, double bx, double by) {
    if (!(ax < bx) || !(ay < by)) throw ValidationError("box: need lo < hi");
    return Region{2, {ax, ay}, {bx, by}};
  }

  double width(int axis) const { return hi[axis] - lo[axis]; }

  double diam() const {
    if (dim == 1) return width(0);
    return std::sqrt(width(0) * width(0) + width(1) * width(1));
  }

  Point center() const {
    Point p;
    p.dim = dim;
    p.c[0] = 0.5 * (lo[0] + hi[0]);
    p.c[1] = dim == 2 ? 0.5 * (lo[1] + hi[1]) : 0.0;
    return p;
  }

  bool contains(const Point& p, double slack = 0.0) const {
    for (int a = 0; a < dim; ++a)
      if (p.c[a] < lo[a] - slack || p.c[a] > hi[a] + slack) return false;
    return true;
  }

  bool contains_region(const Region& r, double slack = 0.0) const {
    for (int a = 0; a < dim; ++a)
      if (r.lo[a] < lo[a] - slack || r.hi[a] > hi[a] + slack) return false;
    return true;
  }

  // Closed-set intersection test.
  bool intersects(const Region& r) const {
    for (int a = 0; a < dim; ++a)
      if (hi[a] < r.lo[a] || r.hi[a] < lo[a]) return false;
    return true;
  }
};

}  // namespace fractaldim

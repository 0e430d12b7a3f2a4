#ifndef SVGAUGE_SRC_GEOMETRY_H_
#define SVGAUGE_SRC_GEOMETRY_H_

#include <algorithm>
#include <cmath>
#include <vector>

namespace svgauge::internal {

struct Point {
  double x = 0.0;
  double y = 0.0;

  Point operator+(Point o) const { return {x + o.x, y + o.y}; }
  Point operator-(Point o) const { return {x - o.x, y - o.y}; }
  Point operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Point&) const = default;
};

inline double Dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double Cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double Length(Point a) { return std::hypot(a.x, a.y); }

// x' = a*x + c*y + e, y' = b*x + d*y + f (the SVG matrix(a b c d e f) layout).
struct Affine {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0, e = 0.0, f = 0.0;

  Point Apply(Point p) const {
    return {a * p.x + c * p.y + e, b * p.x + d * p.y + f};
  }
  // this * other: apply `other` first.
  Affine operator*(const Affine& o) const {
    return {a * o.a + c * o.b,     b * o.a + d * o.b,
            a * o.c + c * o.d,     b * o.c + d * o.d,
            a * o.e + c * o.f + e, b * o.e + d * o.f + f};
  }
  // Largest singular value; bounds how much the map stretches lengths.
  double MaxScale() const {
    const double s1 = a * a + b * b + c * c + d * d;
    const double det = a * d - b * c;
    const double disc = std::sqrt(std::max(0.0, s1 * s1 - 4.0 * det * det));
    return std::sqrt((s1 + disc) / 2.0);
  }
  double Determinant() const { return a * d - b * c; }

  static Affine Translate(double tx, double ty) { return {1, 0, 0, 1, tx, ty}; }
  static Affine Scale(double sx, double sy) { return {sx, 0, 0, sy, 0, 0}; }
};

struct PathSegment {
  enum class Kind { kLine, kCubic };
  Kind kind = Kind::kLine;
  Point c1, c2;  // cubic control points
  Point end;
};

struct SubPath {
  Point start;
  std::vector<PathSegment> segments;
  bool closed = false;
};

struct Path {
  std::vector<SubPath> subpaths;

  void MoveTo(Point p) { subpaths.push_back({p, {}, false}); }
  void LineTo(Point p) {
    EnsureSubPath();
    subpaths.back().segments.push_back({PathSegment::Kind::kLine, {}, {}, p});
  }
  void CubicTo(Point c1, Point c2, Point p) {
    EnsureSubPath();
    subpaths.back().segments.push_back({PathSegment::Kind::kCubic, c1, c2, p});
  }
  void Close() {
    if (!subpaths.empty()) subpaths.back().closed = true;
  }
  bool empty() const { return subpaths.empty(); }

 private:
  void EnsureSubPath() {
    if (subpaths.empty()) subpaths.push_back({});
  }
};

// Polyline in some coordinate space; `closed` means an implicit final edge.
struct Polyline {
  std::vector<Point> points;
  bool closed = false;
};

}  // namespace svgauge::internal

#endif  // SVGAUGE_SRC_GEOMETRY_H_

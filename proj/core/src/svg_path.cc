#include "svg_path.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "svg_style.h"

namespace svgauge::internal {
namespace {

// Cubic control-point distance for a quarter circle.
constexpr double kKappa = 0.5522847498307936;

int ArgCount(char cmd) {
  switch (std::tolower(static_cast<unsigned char>(cmd))) {
    case 'm': case 'l': case 't': return 2;
    case 'h': case 'v': return 1;
    case 'c': return 6;
    case 's': case 'q': return 4;
    case 'a': return 7;
    case 'z': return 0;
    default: return -1;
  }
}

}  // namespace

void AppendArc(Path& path, Point from, double rx, double ry, double x_axis_deg,
               bool large_arc, bool sweep, Point to) {
  if (from == to) return;
  rx = std::abs(rx);
  ry = std::abs(ry);
  if (rx == 0.0 || ry == 0.0) {
    path.LineTo(to);
    return;
  }
  const double phi = x_axis_deg * std::numbers::pi / 180.0;
  const double cos_phi = std::cos(phi);
  const double sin_phi = std::sin(phi);
  const double dx = (from.x - to.x) / 2.0;
  const double dy = (from.y - to.y) / 2.0;
  const double x1p = cos_phi * dx + sin_phi * dy;
  const double y1p = -sin_phi * dx + cos_phi * dy;

  const double lambda = (x1p * x1p) / (rx * rx) + (y1p * y1p) / (ry * ry);
  if (lambda > 1.0) {
    const double s = std::sqrt(lambda);
    rx *= s;
    ry *= s;
  }
  const double num = rx * rx * ry * ry - rx * rx * y1p * y1p - ry * ry * x1p * x1p;
  const double den = rx * rx * y1p * y1p + ry * ry * x1p * x1p;
  double coef = den == 0.0 ? 0.0 : std::sqrt(std::max(0.0, num / den));
  if (large_arc == sweep) coef = -coef;
  const double cxp = coef * rx * y1p / ry;
  const double cyp = -coef * ry * x1p / rx;
  const double cx = cos_phi * cxp - sin_phi * cyp + (from.x + to.x) / 2.0;
  const double cy = sin_phi * cxp + cos_phi * cyp + (from.y + to.y) / 2.0;

  auto angle = [](double ux, double uy, double vx, double vy) {
    return std::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
  };
  const double theta1 = angle(1, 0, (x1p - cxp) / rx, (y1p - cyp) / ry);
  double delta = angle((x1p - cxp) / rx, (y1p - cyp) / ry, (-x1p - cxp) / rx,
                       (-y1p - cyp) / ry);
  if (!sweep && delta > 0) delta -= 2 * std::numbers::pi;
  if (sweep && delta < 0) delta += 2 * std::numbers::pi;

  const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(delta) / (std::numbers::pi / 2) - 1e-9)));
  const double step = delta / pieces;
  const double t = 4.0 / 3.0 * std::tan(step / 4.0);
  auto on_ellipse = [&](double a) {
    const double ex = rx * std::cos(a);
    const double ey = ry * std::sin(a);
    return Point{cx + cos_phi * ex - sin_phi * ey, cy + sin_phi * ex + cos_phi * ey};
  };
  auto derivative = [&](double a) {
    const double ex = -rx * std::sin(a);
    const double ey = ry * std::cos(a);
    return Point{cos_phi * ex - sin_phi * ey, sin_phi * ex + cos_phi * ey};
  };
  double a0 = theta1;
  Point p0 = from;
  for (int i = 0; i < pieces; ++i) {
    const double a1 = a0 + step;
    const Point p1 = (i == pieces - 1) ? to : on_ellipse(a1);
    path.CubicTo(p0 + derivative(a0) * t, p1 - derivative(a1) * t, p1);
    a0 = a1;
    p0 = p1;
  }
}

Path ParsePathData(std::string_view d) {
  Path path;
  NumberScanner scan(d);
  Point current;
  Point subpath_start;
  Point last_cubic_ctrl;
  Point last_quad_ctrl;
  char prev_cmd = 0;
  char cmd = 0;

  while (!scan.AtEnd()) {
    const char c = scan.Peek();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      if (ArgCount(c) < 0) break;
      cmd = c;
      scan.Advance();
    } else if (cmd == 0) {
      break;  // data must start with a command
    } else if (cmd == 'M') {
      cmd = 'L';  // implicit lineto after moveto
    } else if (cmd == 'm') {
      cmd = 'l';
    }
    if ((path.empty() || prev_cmd == 0) && std::tolower(static_cast<unsigned char>(cmd)) != 'm') {
      break;
    }

    const int n = ArgCount(cmd);
    double v[7] = {};
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      if (std::tolower(static_cast<unsigned char>(cmd)) == 'a' && (i == 3 || i == 4)) {
        auto flag = scan.Flag();
        ok = flag.has_value();
        v[i] = flag.value_or(false) ? 1.0 : 0.0;
      } else {
        auto num = scan.Number();
        ok = num.has_value();
        v[i] = num.value_or(0.0);
      }
      scan.SkipSeparator();
    }
    if (!ok) break;

    const bool rel = std::islower(static_cast<unsigned char>(cmd));
    const Point base = rel ? current : Point{};
    const char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(cmd)));
    const char prev_lc = static_cast<char>(std::tolower(static_cast<unsigned char>(prev_cmd)));
    switch (lc) {
      case 'm':
        current = base + Point{v[0], v[1]};
        path.MoveTo(current);
        subpath_start = current;
        break;
      case 'l':
        current = base + Point{v[0], v[1]};
        path.LineTo(current);
        break;
      case 'h':
        current = {(rel ? current.x : 0.0) + v[0], current.y};
        path.LineTo(current);
        break;
      case 'v':
        current = {current.x, (rel ? current.y : 0.0) + v[0]};
        path.LineTo(current);
        break;
      case 'c': {
        const Point c1 = base + Point{v[0], v[1]};
        const Point c2 = base + Point{v[2], v[3]};
        current = base + Point{v[4], v[5]};
        path.CubicTo(c1, c2, current);
        last_cubic_ctrl = c2;
        break;
      }
      case 's': {
        const Point c1 = (prev_lc == 'c' || prev_lc == 's')
                             ? current * 2.0 - last_cubic_ctrl
                             : current;
        const Point c2 = base + Point{v[0], v[1]};
        current = base + Point{v[2], v[3]};
        path.CubicTo(c1, c2, current);
        last_cubic_ctrl = c2;
        break;
      }
      case 'q':
      case 't': {
        Point q;
        Point end;
        if (lc == 'q') {
          q = base + Point{v[0], v[1]};
          end = base + Point{v[2], v[3]};
        } else {
          q = (prev_lc == 'q' || prev_lc == 't') ? current * 2.0 - last_quad_ctrl
                                                 : current;
          end = base + Point{v[0], v[1]};
        }
        path.CubicTo(current + (q - current) * (2.0 / 3.0),
                     end + (q - end) * (2.0 / 3.0), end);
        last_quad_ctrl = q;
        current = end;
        break;
      }
      case 'a': {
        const Point end = base + Point{v[5], v[6]};
        AppendArc(path, current, v[0], v[1], v[2], v[3] != 0.0, v[4] != 0.0, end);
        current = end;
        break;
      }
      case 'z':
        path.Close();
        current = subpath_start;
        // A drawing command right after Z starts a new subpath at the same point.
        path.MoveTo(current);
        break;
    }
    prev_cmd = cmd;
    if (lc == 'z') cmd = 0;
    if (lc == 'z' && !scan.AtEnd() && !std::isalpha(static_cast<unsigned char>(scan.Peek()))) {
      break;
    }
  }
  // Drop the empty trailing subpaths left behind by Z.
  std::erase_if(path.subpaths, [](const SubPath& s) {
    return s.segments.empty() && !s.closed;
  });
  return path;
}

Path EllipsePath(double cx, double cy, double rx, double ry) {
  Path p;
  const double kx = rx * kKappa;
  const double ky = ry * kKappa;
  p.MoveTo({cx + rx, cy});
  p.CubicTo({cx + rx, cy + ky}, {cx + kx, cy + ry}, {cx, cy + ry});
  p.CubicTo({cx - kx, cy + ry}, {cx - rx, cy + ky}, {cx - rx, cy});
  p.CubicTo({cx - rx, cy - ky}, {cx - kx, cy - ry}, {cx, cy - ry});
  p.CubicTo({cx + kx, cy - ry}, {cx + rx, cy - ky}, {cx + rx, cy});
  p.Close();
  return p;
}

Path RectPath(double x, double y, double w, double h, double rx, double ry) {
  Path p;
  rx = std::min(rx, w / 2.0);
  ry = std::min(ry, h / 2.0);
  if (rx <= 0.0 || ry <= 0.0) {
    p.MoveTo({x, y});
    p.LineTo({x + w, y});
    p.LineTo({x + w, y + h});
    p.LineTo({x, y + h});
    p.Close();
    return p;
  }
  const double kx = rx * kKappa;
  const double ky = ry * kKappa;
  p.MoveTo({x + rx, y});
  p.LineTo({x + w - rx, y});
  p.CubicTo({x + w - rx + kx, y}, {x + w, y + ry - ky}, {x + w, y + ry});
  p.LineTo({x + w, y + h - ry});
  p.CubicTo({x + w, y + h - ry + ky}, {x + w - rx + kx, y + h}, {x + w - rx, y + h});
  p.LineTo({x + rx, y + h});
  p.CubicTo({x + rx - kx, y + h}, {x, y + h - ry + ky}, {x, y + h - ry});
  p.LineTo({x, y + ry});
  p.CubicTo({x, y + ry - ky}, {x + rx - kx, y}, {x + rx, y});
  p.Close();
  return p;
}

std::vector<Polyline> Flatten(const Path& path, double tolerance) {
  std::vector<Polyline> out;
  tolerance = std::max(tolerance, 1e-9);
  for (const SubPath& sub : path.subpaths) {
    Polyline line;
    line.closed = sub.closed;
    line.points.push_back(sub.start);
    Point cur = sub.start;
    for (const PathSegment& seg : sub.segments) {
      if (seg.kind == PathSegment::Kind::kLine) {
        line.points.push_back(seg.end);
      } else {
        // Segment count from the second-difference bound of the cubic.
        const Point dd1 = cur - seg.c1 * 2.0 + seg.c2;
        const Point dd2 = seg.c1 - seg.c2 * 2.0 + seg.end;
        const double dd = std::max(Length(dd1), Length(dd2));
        int n = static_cast<int>(std::ceil(std::sqrt(0.75 * dd / tolerance)));
        n = std::clamp(n, 1, 512);
        for (int i = 1; i <= n; ++i) {
          const double t = static_cast<double>(i) / n;
          const double mt = 1.0 - t;
          const Point p = cur * (mt * mt * mt) + seg.c1 * (3 * mt * mt * t) +
                          seg.c2 * (3 * mt * t * t) + seg.end * (t * t * t);
          line.points.push_back(i == n ? seg.end : p);
        }
      }
      cur = seg.end;
    }
    out.push_back(std::move(line));
  }
  return out;
}

}  // namespace svgauge::internal

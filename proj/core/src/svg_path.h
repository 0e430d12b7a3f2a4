#ifndef SVGAUGE_SRC_SVG_PATH_H_
#define SVGAUGE_SRC_SVG_PATH_H_

#include <string_view>

#include "geometry.h"

namespace svgauge::internal {

// Parses SVG path data. On a syntax error the path is rendered up to the last
// complete command, which is how user agents treat bad `d` attributes.
Path ParsePathData(std::string_view d);

// Appends an elliptical arc (endpoint parameterization) as cubic segments.
void AppendArc(Path& path, Point from, double rx, double ry, double x_axis_deg,
               bool large_arc, bool sweep, Point to);

Path EllipsePath(double cx, double cy, double rx, double ry);
Path RectPath(double x, double y, double w, double h, double rx, double ry);

// Flattens curves into polylines. `tolerance` is the maximum chord error in
// the path's own coordinate space.
std::vector<Polyline> Flatten(const Path& path, double tolerance);

}  // namespace svgauge::internal

#endif  // SVGAUGE_SRC_SVG_PATH_H_

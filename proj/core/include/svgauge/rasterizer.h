#ifndef SVGAUGE_RASTERIZER_H_
#define SVGAUGE_RASTERIZER_H_

#include "svgauge/raster_image.h"
#include "svgauge/svg_document.h"

namespace svgauge {

struct RasterizeInfo {
  // Set when the document declares neither a viewBox nor absolute
  // width/height and the union bounding box of drawn geometry was used.
  bool viewport_from_geometry = false;
  int drawn_elements = 0;
};

// Renders `doc` into a target_size x target_size image on a white background.
// The viewport is scaled uniformly to fit the square and centered; content
// outside the viewport is clipped. Output depends only on the inputs.
//
// Throws Error{kRenderFailure} for well-formed documents that cannot be
// rendered (invalid viewBox, `use` reference cycles, non-finite geometry,
// runaway nesting or geometry size).
RasterImage Rasterize(const SvgDocument& doc, int target_size,
                      RasterizeInfo* info = nullptr);

}  // namespace svgauge

#endif  // SVGAUGE_RASTERIZER_H_

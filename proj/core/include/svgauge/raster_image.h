#ifndef SVGAUGE_RASTER_IMAGE_H_
#define SVGAUGE_RASTER_IMAGE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace svgauge {

inline constexpr double kDefaultBlankTolerance = 2.0 / 255.0;

// Row-major RGB image with channels in [0, 1]. A freshly constructed image is
// the white background every render starts from.
class RasterImage {
 public:
  RasterImage(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  // Interleaved RGB, length width * height * 3.
  std::span<const float> pixels() const { return pixels_; }
  std::span<float> mutable_pixels() { return pixels_; }

  const float* At(int x, int y) const { return &pixels_[Index(x, y)]; }
  float* At(int x, int y) { return &pixels_[Index(x, y)]; }

  // 8-bit quantization (round to nearest) used for PNG export and content keys.
  std::vector<std::uint8_t> ToRgb8() const;

  bool operator==(const RasterImage& other) const = default;

 private:
  size_t Index(int x, int y) const {
    return (static_cast<size_t>(y) * width_ + x) * 3;
  }

  int width_;
  int height_;
  std::vector<float> pixels_;
};

// True iff every channel of every pixel is >= 1 - tol.
bool IsBlank(const RasterImage& img, double tol = kDefaultBlankTolerance);

std::string EncodePng(const RasterImage& img);
RasterImage DecodePng(std::string_view png);
void WritePng(const RasterImage& img, const std::string& path);

}  // namespace svgauge

#endif  // SVGAUGE_RASTER_IMAGE_H_

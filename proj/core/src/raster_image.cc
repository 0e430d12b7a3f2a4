#include "svgauge/raster_image.h"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "svgauge/error.h"

namespace svgauge {

RasterImage::RasterImage(int width, int height)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kRenderFailure, "raster dimensions must be positive");
  }
  pixels_.assign(static_cast<size_t>(width) * height * 3, 1.0f);
}

std::vector<std::uint8_t> RasterImage::ToRgb8() const {
  std::vector<std::uint8_t> out(pixels_.size());
  std::transform(pixels_.begin(), pixels_.end(), out.begin(), [](float v) {
    return static_cast<std::uint8_t>(
        std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
  });
  return out;
}

bool IsBlank(const RasterImage& img, double tol) {
  const double threshold = 1.0 - tol;
  return std::all_of(img.pixels().begin(), img.pixels().end(),
                     [threshold](float v) { return v >= threshold; });
}

namespace {

void PngWriteToString(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), length);
}

void PngFlush(png_structp) {}

struct PngReadState {
  std::string_view data;
  size_t offset = 0;
};

void PngReadFromView(png_structp png, png_bytep out, png_size_t length) {
  auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (state->offset + length > state->data.size()) {
    png_error(png, "truncated PNG");
  }
  std::memcpy(out, state->data.data() + state->offset, length);
  state->offset += length;
}

}  // namespace

std::string EncodePng(const RasterImage& img) {
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw Error(ErrorCode::kIoError, "png_create_write_struct");
  png_infop info = png_create_info_struct(png);
  std::string out;
  const std::vector<std::uint8_t> rgb = img.ToRgb8();
  if (info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIoError, "PNG encoding failed");
  }
  png_set_write_fn(png, &out, &PngWriteToString, &PngFlush);
  png_set_IHDR(png, info, img.width(), img.height(), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const size_t stride = static_cast<size_t>(img.width()) * 3;
  for (int y = 0; y < img.height(); ++y) {
    png_write_row(png, const_cast<png_bytep>(rgb.data() + y * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

RasterImage DecodePng(std::string_view data) {
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw Error(ErrorCode::kIoError, "png_create_read_struct");
  png_infop info = png_create_info_struct(png);
  PngReadState state{data, 0};
  // Declared before setjmp so longjmp leaves them in a defined state.
  std::vector<std::uint8_t> row;
  std::vector<float> pixels;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  if (info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kIoError, "PNG decoding failed");
  }
  png_set_read_fn(png, &state, &PngReadFromView);
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_gray_to_rgb(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);
  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  row.resize(png_get_rowbytes(png, info));
  pixels.reserve(static_cast<size_t>(width) * height * 3);
  for (png_uint_32 y = 0; y < height; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (png_uint_32 i = 0; i < width * 3; ++i) pixels.push_back(row[i] / 255.0f);
  }
  png_destroy_read_struct(&png, &info, nullptr);

  RasterImage img(static_cast<int>(width), static_cast<int>(height));
  std::copy(pixels.begin(), pixels.end(), img.mutable_pixels().begin());
  return img;
}

void WritePng(const RasterImage& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path);
  const std::string bytes = EncodePng(img);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

}  // namespace svgauge

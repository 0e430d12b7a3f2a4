#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <memory>

#include "svgauge/backend.h"
#include "svgauge/error.h"

namespace svgauge {

std::string Sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIoError, "SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string ImageContentKey(const RasterImage& img, std::string_view backend_name) {
  const auto rgb = img.ToRgb8();
  std::string buf(backend_name);
  buf.push_back('\0');
  buf += std::to_string(img.width()) + "x" + std::to_string(img.height());
  buf.push_back('\0');
  buf.append(reinterpret_cast<const char*>(rgb.data()), rgb.size());
  return "img:" + Sha256Hex(buf);
}

std::string TextContentKey(std::string_view text, std::string_view backend_name) {
  std::string buf(backend_name);
  buf.push_back('\0');
  buf.append(text);
  return "txt:" + Sha256Hex(buf);
}

FeatureGrid EmbeddingBackend::ImageFeatureGrid(const RasterImage& img) {
  const int res = descriptor().image_input_resolution;
  if (img.width() != res || img.height() != res) {
    throw Error(ErrorCode::kDimensionMismatch,
                "image is " + std::to_string(img.width()) + "x" +
                    std::to_string(img.height()) + ", backend expects " +
                    std::to_string(res) + "x" + std::to_string(res));
  }
  FeatureGrid grid = DoImageFeatureGrid(img);
  grid.Validate();
  if (grid.dim != descriptor().image_dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "backend returned grid dim " + std::to_string(grid.dim) + ", declared " +
                    std::to_string(descriptor().image_dim));
  }
  return grid;
}

EmbeddingVector EmbeddingBackend::TextEmbedding(std::string_view text) {
  if (std::all_of(text.begin(), text.end(),
                  [](unsigned char c) { return std::isspace(c); })) {
    throw Error(ErrorCode::kEmptyText, "text is empty after trimming");
  }
  EmbeddingVector v = DoTextEmbedding(text);
  v.kind = EmbeddingKind::kText;
  ValidateEmbedding(v);
  if (v.dim() != descriptor().text_dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "backend returned text dim " + std::to_string(v.dim()) + ", declared " +
                    std::to_string(descriptor().text_dim));
  }
  return v;
}

std::string EmbeddingBackend::Caption(const RasterImage& img) {
  std::string caption = DoCaption(img);
  if (std::all_of(caption.begin(), caption.end(),
                  [](unsigned char c) { return std::isspace(c); })) {
    throw Error(ErrorCode::kEmptyCaption, "captioner returned empty text");
  }
  return caption;
}

}  // namespace svgauge

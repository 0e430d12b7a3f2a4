#ifndef SVGAUGE_HTTP_BACKEND_H_
#define SVGAUGE_HTTP_BACKEND_H_

#include <string>

#include "svgauge/backend.h"

namespace svgauge {

// Client for the model-server sidecar:
//   GET  /v1/info            -> {name, image_input_resolution, image_dim, text_dim,
//                                grid_h, grid_w, has_cls[, max_in_flight]}
//   POST /v1/image_features  {"image_png_base64"} -> {h, w, dim, cls|null, data}
//   POST /v1/text_embedding  {"text"}             -> {dim, data}
//   POST /v1/caption         {"image_png_base64"} -> {caption}
// Every response is checked against the /v1/info declaration.
class HttpBackend : public EmbeddingBackend {
 public:
  // `base_url` like "http://127.0.0.1:8080". Queries /v1/info immediately.
  explicit HttpBackend(std::string base_url, int timeout_seconds = 120);

  const BackendDescriptor& descriptor() const override { return descriptor_; }
  int grid_h() const { return grid_h_; }
  int grid_w() const { return grid_w_; }
  bool has_cls() const { return has_cls_; }

 protected:
  FeatureGrid DoImageFeatureGrid(const RasterImage& img) override;
  EmbeddingVector DoTextEmbedding(std::string_view text) override;
  std::string DoCaption(const RasterImage& img) override;

 private:
  std::string Post(const std::string& endpoint, const std::string& body) const;

  std::string base_url_;
  int timeout_seconds_;
  BackendDescriptor descriptor_;
  int grid_h_ = 0;
  int grid_w_ = 0;
  bool has_cls_ = false;
};

std::string Base64Encode(std::string_view bytes);

}  // namespace svgauge

#endif  // SVGAUGE_HTTP_BACKEND_H_

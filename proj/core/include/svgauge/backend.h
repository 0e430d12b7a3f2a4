#ifndef SVGAUGE_BACKEND_H_
#define SVGAUGE_BACKEND_H_

#include <memory>
#include <string>
#include <string_view>

#include "svgauge/embedding.h"
#include "svgauge/raster_image.h"

namespace svgauge {

// Opaque image encoder / text encoder / captioner. Implementations must be
// safe to call from several threads at once (up to max_in_flight).
//
// The public entry points enforce the shared contract (input resolution,
// returned shapes, empty texts and captions); subclasses implement the
// Do* hooks.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;

  virtual const BackendDescriptor& descriptor() const = 0;

  // `img` must be image_input_resolution square.
  // Errors: kBackendUnavailable, kDimensionMismatch.
  FeatureGrid ImageFeatureGrid(const RasterImage& img);

  // Errors: kEmptyText (blank after trimming), kBackendUnavailable,
  // kDimensionMismatch.
  EmbeddingVector TextEmbedding(std::string_view text);

  // Errors: kBackendUnavailable, kEmptyCaption.
  std::string Caption(const RasterImage& img);

 protected:
  virtual FeatureGrid DoImageFeatureGrid(const RasterImage& img) = 0;
  virtual EmbeddingVector DoTextEmbedding(std::string_view text) = 0;
  virtual std::string DoCaption(const RasterImage& img) = 0;
};

// Content keys shared with the embedding-cache file format and the sidecar's
// cache exporter:
//   image : "img:" + hex(SHA-256(backend_name || 0x00 || "<w>x<h>" || 0x00 || RGB8 pixels))
//   text  : "txt:" + hex(SHA-256(backend_name || 0x00 || UTF-8 text))
std::string ImageContentKey(const RasterImage& img, std::string_view backend_name);
std::string TextContentKey(std::string_view text, std::string_view backend_name);

std::string Sha256Hex(std::string_view bytes);

// Backend selection strings:
//   cache:<path>            hermetic JSONL embedding cache
//   http:<host:port>|<url>  model-server sidecar
//   stub[:k=v,...]          deterministic synthetic encoders (testing)
// The returned backend memoizes every result by content key.
std::shared_ptr<EmbeddingBackend> MakeBackend(std::string_view spec);

}  // namespace svgauge

#endif  // SVGAUGE_BACKEND_H_

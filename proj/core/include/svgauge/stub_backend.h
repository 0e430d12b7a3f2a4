#ifndef SVGAUGE_STUB_BACKEND_H_
#define SVGAUGE_STUB_BACKEND_H_

#include <cstdint>
#include <string>

#include "svgauge/backend.h"

namespace svgauge {

struct StubBackendOptions {
  std::string name = "stub-v1";
  int resolution = 32;
  int grid = 4;  // tokens per side; must divide resolution
  int image_dim = 16;
  int text_dim = 32;
  std::uint64_t seed = 7;
  bool has_cls = true;
  int max_in_flight = 8;
};

// Deterministic synthetic encoders for hermetic runs. Image tokens are fixed
// random projections of per-patch darkness statistics (so similar drawings
// get similar features); text vectors hash words and character trigrams.
// There is no captioner: Caption() throws kBackendUnavailable.
class StubBackend : public EmbeddingBackend {
 public:
  explicit StubBackend(StubBackendOptions options = {});

  const BackendDescriptor& descriptor() const override { return descriptor_; }
  const StubBackendOptions& options() const { return options_; }

 protected:
  FeatureGrid DoImageFeatureGrid(const RasterImage& img) override;
  EmbeddingVector DoTextEmbedding(std::string_view text) override;
  std::string DoCaption(const RasterImage& img) override;

 private:
  double Weight(std::uint64_t matrix, std::uint64_t i, std::uint64_t j) const;

  StubBackendOptions options_;
  BackendDescriptor descriptor_;
};

}  // namespace svgauge

#endif  // SVGAUGE_STUB_BACKEND_H_

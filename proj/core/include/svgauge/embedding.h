#ifndef SVGAUGE_EMBEDDING_H_
#define SVGAUGE_EMBEDDING_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace svgauge {

struct BackendDescriptor {
  std::string name;
  int image_input_resolution = 0;
  int image_dim = 0;
  int text_dim = 0;
  // Maximum number of concurrent requests the backend accepts.
  int max_in_flight = 1;

  void Validate() const;  // throws Error{kConfigError}
};

// Last-layer token grid of an image encoder, row-major h x w x dim.
struct FeatureGrid {
  int h = 0;
  int w = 0;
  int dim = 0;
  std::vector<double> data;
  std::optional<std::vector<double>> cls;

  std::span<const double> Token(int index) const {
    return std::span<const double>(data).subspan(static_cast<size_t>(index) * dim, dim);
  }
  int tokens() const { return h * w; }

  // Throws Error{kDimensionMismatch} if the shape fields disagree with data.
  void Validate() const;
};

enum class EmbeddingKind { kImage, kText };

struct EmbeddingVector {
  EmbeddingKind kind = EmbeddingKind::kImage;
  std::vector<double> values;

  int dim() const { return static_cast<int>(values.size()); }
  bool operator==(const EmbeddingVector&) const = default;
};

// Throws Error{kDimensionMismatch} on non-finite entries or empty vectors.
void ValidateEmbedding(const EmbeddingVector& v);

double Norm(std::span<const double> v);
double Dot(std::span<const double> a, std::span<const double> b);

}  // namespace svgauge

#endif  // SVGAUGE_EMBEDDING_H_

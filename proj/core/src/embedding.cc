#include "svgauge/embedding.h"

#include <cmath>
#include <numeric>

#include "svgauge/error.h"

namespace svgauge {

void BackendDescriptor::Validate() const {
  if (name.empty()) throw Error(ErrorCode::kConfigError, "backend name is empty");
  if (image_input_resolution < 1 || image_dim < 1 || text_dim < 1) {
    throw Error(ErrorCode::kConfigError,
                "backend " + name + " declares non-positive resolution or dims");
  }
  if (max_in_flight < 1) {
    throw Error(ErrorCode::kConfigError, "backend " + name + " max_in_flight < 1");
  }
}

void FeatureGrid::Validate() const {
  if (h < 1 || w < 1 || dim < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "feature grid has non-positive shape");
  }
  if (data.size() != static_cast<size_t>(h) * w * dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "feature grid data length " + std::to_string(data.size()) +
                    " != h*w*dim = " + std::to_string(static_cast<size_t>(h) * w * dim));
  }
  if (cls && cls->size() != static_cast<size_t>(dim)) {
    throw Error(ErrorCode::kDimensionMismatch, "CLS length differs from grid dim");
  }
  for (double v : data) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kDimensionMismatch, "non-finite feature");
  }
}

void ValidateEmbedding(const EmbeddingVector& v) {
  if (v.values.empty()) throw Error(ErrorCode::kDimensionMismatch, "empty embedding");
  for (double x : v.values) {
    if (!std::isfinite(x)) throw Error(ErrorCode::kDimensionMismatch, "non-finite embedding");
  }
}

double Dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "dot product of vectors with dims " + std::to_string(a.size()) + " and " +
                    std::to_string(b.size()));
  }
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double Norm(std::span<const double> v) { return std::sqrt(Dot(v, v)); }

}  // namespace svgauge

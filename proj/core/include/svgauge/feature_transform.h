#ifndef SVGAUGE_FEATURE_TRANSFORM_H_
#define SVGAUGE_FEATURE_TRANSFORM_H_

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "svgauge/embedding.h"

namespace svgauge {

// Eigenvalues at or below this fraction of the largest are treated as
// numerically zero and never retained.
inline constexpr double kEigenvalueFloor = 1e-6;
inline constexpr int kDefaultComponents = 128;

// Fitted PCA (+ optional whitening) over a corpus of image embeddings.
// Covariance uses divisor n. Each eigenvector row is sign-normalized so its
// largest-magnitude entry is positive.
struct FeatureTransform {
  int input_dim = 0;
  int components = 0;
  std::vector<double> mean;                       // input_dim
  std::vector<std::vector<double>> eigenvectors;  // components x input_dim, orthonormal rows
  std::vector<double> eigenvalues;                // components, nonincreasing, > 0
  bool whiten = true;
  std::string backend_name;
  std::string corpus_fingerprint;

  // Throws Error{kInvalidModel} when an invariant fails.
  void Validate() const;

  nlohmann::ordered_json ToJson() const;
  static FeatureTransform FromJson(const nlohmann::json& j);
  void Save(const std::string& path) const;
  static FeatureTransform Load(const std::string& path);
};

// Errors: kEmptyCorpus, kDimensionMismatch, kDegenerateCorpus.
// `warning` (optional) receives a message when fewer than `components`
// eigenpairs survive the floor.
FeatureTransform FitFeatureTransform(std::span<const EmbeddingVector> corpus, int components,
                                     bool whiten, std::string backend_name = {},
                                     std::string* warning = nullptr);

// y = P^T (x - mu), then y_i /= sqrt(lambda_i) when whitening.
EmbeddingVector ApplyFeatureTransform(const FeatureTransform& t, const EmbeddingVector& x);

// Cosine similarity; kZeroVector if either norm is below 1e-12,
// kDimensionMismatch on unequal dims.
double CosineSimilarity(std::span<const double> a, std::span<const double> b);

// S_I: cosine between transformed reference and generated embeddings.
double VisualSimilarity(const EmbeddingVector& a, const EmbeddingVector& b);

}  // namespace svgauge

#endif  // SVGAUGE_FEATURE_TRANSFORM_H_

#include "svgauge/feature_transform.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "svgauge/backend.h"
#include "svgauge/error.h"

namespace svgauge {
namespace {

constexpr double kZeroNorm = 1e-12;
constexpr double kOrthonormalTolerance = 1e-8;

std::string Fingerprint(std::span<const EmbeddingVector> corpus) {
  std::string bytes;
  auto put_u64 = [&bytes](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  };
  put_u64(corpus.size());
  put_u64(corpus.empty() ? 0 : corpus.front().values.size());
  for (const auto& v : corpus) {
    for (double x : v.values) {
      std::uint64_t bits;
      std::memcpy(&bits, &x, sizeof bits);
      put_u64(bits);
    }
  }
  return "sha256:" + Sha256Hex(bytes);
}

}  // namespace

FeatureTransform FitFeatureTransform(std::span<const EmbeddingVector> corpus, int components,
                                     bool whiten, std::string backend_name,
                                     std::string* warning) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "PCA corpus is empty");
  if (components < 1) throw Error(ErrorCode::kConfigError, "components must be >= 1");
  const int d = corpus.front().dim();
  const auto n = static_cast<Eigen::Index>(corpus.size());
  if (d < 1) throw Error(ErrorCode::kDimensionMismatch, "corpus vectors are empty");

  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& v = corpus[static_cast<size_t>(i)];
    if (v.dim() != d) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "corpus vector " + std::to_string(i) + " has dim " + std::to_string(v.dim()) +
                      ", expected " + std::to_string(d));
    }
    ValidateEmbedding(v);
    x.row(i) = Eigen::Map<const Eigen::RowVectorXd>(v.values.data(), d);
  }

  const Eigen::RowVectorXd mu = x.colwise().mean();
  x.rowwise() -= mu;
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kDegenerateCorpus, "eigendecomposition did not converge");
  }
  // Eigen returns ascending eigenvalues.
  const Eigen::VectorXd& values = solver.eigenvalues();
  const Eigen::MatrixXd& vectors = solver.eigenvectors();
  const double largest = values(d - 1);
  if (!(largest > 0.0)) {
    throw Error(ErrorCode::kDegenerateCorpus, "corpus covariance has no positive eigenvalue");
  }

  FeatureTransform t;
  t.input_dim = d;
  t.whiten = whiten;
  t.backend_name = std::move(backend_name);
  t.corpus_fingerprint = Fingerprint(corpus);
  t.mean.assign(mu.data(), mu.data() + d);
  for (int k = d - 1; k >= 0 && static_cast<int>(t.eigenvalues.size()) < components; --k) {
    if (values(k) <= kEigenvalueFloor * largest) break;
    std::vector<double> row(vectors.col(k).data(), vectors.col(k).data() + d);
    int arg = 0;
    for (int j = 1; j < d; ++j) {
      if (std::abs(row[j]) > std::abs(row[arg])) arg = j;
    }
    if (row[arg] < 0) {
      for (double& v : row) v = -v;
    }
    t.eigenvectors.push_back(std::move(row));
    t.eigenvalues.push_back(values(k));
  }
  t.components = static_cast<int>(t.eigenvalues.size());
  if (t.components < components && warning != nullptr) {
    *warning = "only " + std::to_string(t.components) + " of " + std::to_string(components) +
               " requested components have eigenvalues above the numerical floor";
  }
  return t;
}

EmbeddingVector ApplyFeatureTransform(const FeatureTransform& t, const EmbeddingVector& x) {
  if (x.dim() != t.input_dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "embedding dim " + std::to_string(x.dim()) + " != transform input dim " +
                    std::to_string(t.input_dim));
  }
  EmbeddingVector y;
  y.kind = x.kind;
  y.values.resize(t.components);
  std::vector<double> centered(x.values.size());
  for (size_t j = 0; j < centered.size(); ++j) centered[j] = x.values[j] - t.mean[j];
  for (int i = 0; i < t.components; ++i) {
    double v = Dot(t.eigenvectors[i], centered);
    if (t.whiten) v /= std::sqrt(t.eigenvalues[i]);
    y.values[i] = v;
  }
  return y;
}

double CosineSimilarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "cosine of vectors with different dims");
  }
  const double na2 = Dot(a, a);
  const double nb2 = Dot(b, b);
  if (std::sqrt(na2) < kZeroNorm || std::sqrt(nb2) < kZeroNorm) {
    throw Error(ErrorCode::kZeroVector, "cosine similarity of a zero vector");
  }
  // sqrt(n * n) == n exactly, so identical inputs give exactly 1.
  return std::clamp(Dot(a, b) / std::sqrt(na2 * nb2), -1.0, 1.0);
}

double VisualSimilarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  return CosineSimilarity(a.values, b.values);
}

void FeatureTransform::Validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidModel, msg); };
  if (input_dim < 1) fail("input_dim must be positive");
  if (components < 1 || components > input_dim) fail("components must be in [1, input_dim]");
  if (mean.size() != static_cast<size_t>(input_dim)) fail("mean length != input_dim");
  if (eigenvalues.size() != static_cast<size_t>(components)) fail("eigenvalues length != components");
  if (eigenvectors.size() != static_cast<size_t>(components)) fail("eigenvectors rows != components");
  for (const auto& row : eigenvectors) {
    if (row.size() != static_cast<size_t>(input_dim)) fail("eigenvector length != input_dim");
  }
  for (int i = 0; i < components; ++i) {
    if (!(eigenvalues[i] > 0) || !std::isfinite(eigenvalues[i])) fail("eigenvalues must be positive");
    if (i > 0 && eigenvalues[i] > eigenvalues[i - 1]) fail("eigenvalues must be nonincreasing");
    for (int j = 0; j <= i; ++j) {
      const double dot = Dot(eigenvectors[i], eigenvectors[j]);
      const double expected = i == j ? 1.0 : 0.0;
      if (!(std::abs(dot - expected) <= kOrthonormalTolerance)) {
        fail("eigenvectors are not orthonormal");
      }
    }
  }
  for (double m : mean) {
    if (!std::isfinite(m)) fail("mean has non-finite entries");
  }
}

nlohmann::ordered_json FeatureTransform::ToJson() const {
  nlohmann::ordered_json j;
  j["input_dim"] = input_dim;
  j["components"] = components;
  j["mean"] = mean;
  j["eigenvectors"] = eigenvectors;
  j["eigenvalues"] = eigenvalues;
  j["whiten"] = whiten;
  j["backend_name"] = backend_name;
  j["corpus_fingerprint"] = corpus_fingerprint;
  j["covariance_divisor"] = "n";
  return j;
}

FeatureTransform FeatureTransform::FromJson(const nlohmann::json& j) {
  FeatureTransform t;
  try {
    t.input_dim = j.at("input_dim").get<int>();
    t.components = j.at("components").get<int>();
    t.mean = j.at("mean").get<std::vector<double>>();
    t.eigenvectors = j.at("eigenvectors").get<std::vector<std::vector<double>>>();
    t.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
    t.whiten = j.at("whiten").get<bool>();
    t.backend_name = j.at("backend_name").get<std::string>();
    t.corpus_fingerprint = j.at("corpus_fingerprint").get<std::string>();
    if (j.at("covariance_divisor").get<std::string>() != "n") {
      throw Error(ErrorCode::kInvalidModel, "unsupported covariance_divisor");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidModel, std::string("transform file: ") + e.what());
  }
  t.Validate();
  return t;
}

void FeatureTransform::Save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out << ToJson().dump(1) << '\n';
}

FeatureTransform FeatureTransform::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kInvalidModel, path + " is not valid JSON");
  return FromJson(j);
}

}  // namespace svgauge

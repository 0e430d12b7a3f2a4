#include "svgauge/stub_backend.h"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "svgauge/error.h"
#include "svgauge/tfidf.h"

namespace svgauge {
namespace {

constexpr int kDescriptorSize = 12;  // 2x2 sub-cells x RGB

std::uint64_t Mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t Fnv1a(std::string_view s, std::uint64_t seed) {
  std::uint64_t h = 0xCBF29CE484222325ULL ^ Mix(seed);
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return Mix(h);
}

}  // namespace

StubBackend::StubBackend(StubBackendOptions options) : options_(std::move(options)) {
  descriptor_.name = options_.name;
  descriptor_.image_input_resolution = options_.resolution;
  descriptor_.image_dim = options_.image_dim;
  descriptor_.text_dim = options_.text_dim;
  descriptor_.max_in_flight = options_.max_in_flight;
  descriptor_.Validate();
  if (options_.grid < 1 || options_.resolution % options_.grid != 0) {
    throw Error(ErrorCode::kConfigError, "stub grid must divide the resolution");
  }
}

double StubBackend::Weight(std::uint64_t matrix, std::uint64_t i, std::uint64_t j) const {
  const std::uint64_t h = Mix(Mix(Mix(options_.seed ^ Mix(matrix)) ^ i) ^ (j * 0x632BE59BD9B4E019ULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

FeatureGrid StubBackend::DoImageFeatureGrid(const RasterImage& img) {
  const int g = options_.grid;
  const int patch = options_.resolution / g;
  const int half = std::max(1, patch / 2);
  FeatureGrid grid;
  grid.h = g;
  grid.w = g;
  grid.dim = options_.image_dim;
  grid.data.reserve(static_cast<size_t>(g) * g * grid.dim);
  std::vector<double> mean_desc(kDescriptorSize, 0.0);
  // Work from the 8-bit pixels: that is what content keys and the sidecar see.
  const std::vector<std::uint8_t> rgb = img.ToRgb8();
  const int width = img.width();

  for (int gy = 0; gy < g; ++gy) {
    for (int gx = 0; gx < g; ++gx) {
      double desc[kDescriptorSize] = {};
      int counts[4] = {};
      for (int y = 0; y < patch; ++y) {
        for (int x = 0; x < patch; ++x) {
          const int cell = (y >= half ? 2 : 0) + (x >= half ? 1 : 0);
          const size_t at = (static_cast<size_t>(gy * patch + y) * width + gx * patch + x) * 3;
          for (int c = 0; c < 3; ++c) desc[cell * 3 + c] += 1.0 - rgb[at + c] / 255.0;
          ++counts[cell];
        }
      }
      for (int cell = 0; cell < 4; ++cell) {
        for (int c = 0; c < 3; ++c) {
          // Patches of one pixel leave three sub-cells empty; mirror cell 0.
          desc[cell * 3 + c] = counts[cell] ? desc[cell * 3 + c] / counts[cell] : desc[c];
        }
      }
      const int token = gy * g + gx;
      for (int k = 0; k < grid.dim; ++k) {
        double acc = 0.0;
        for (int j = 0; j < kDescriptorSize; ++j) {
          acc += (Weight(1, k, j) + 0.5 * Weight(2 + token, k, j)) * desc[j];
        }
        grid.data.push_back(std::tanh(acc));
      }
      for (int j = 0; j < kDescriptorSize; ++j) mean_desc[j] += desc[j] / (g * g);
    }
  }
  if (options_.has_cls) {
    std::vector<double> cls(grid.dim);
    for (int k = 0; k < grid.dim; ++k) {
      double acc = 0.0;
      for (int j = 0; j < kDescriptorSize; ++j) acc += Weight(0xC15, k, j) * mean_desc[j];
      cls[k] = std::tanh(acc);
    }
    grid.cls = std::move(cls);
  }
  return grid;
}

EmbeddingVector StubBackend::DoTextEmbedding(std::string_view text) {
  EmbeddingVector v;
  v.kind = EmbeddingKind::kText;
  v.values.assign(options_.text_dim, 0.0);
  auto add = [&](std::string_view gram, double weight) {
    const std::uint64_t h = Fnv1a(gram, options_.seed);
    const size_t idx = h % static_cast<std::uint64_t>(options_.text_dim);
    v.values[idx] += (h >> 63) ? weight : -weight;
  };
  for (const auto& token : Tokenize(text)) add(token, 1.0);

  std::string lowered(text);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  const std::string padded = "#" + lowered + "#";
  for (size_t i = 0; i + 3 <= padded.size(); ++i) {
    add(std::string_view(padded).substr(i, 3), 0.25);
  }
  return v;
}

std::string StubBackend::DoCaption(const RasterImage&) {
  throw Error(ErrorCode::kBackendUnavailable, "backend " + options_.name + " has no captioner");
}

}  // namespace svgauge

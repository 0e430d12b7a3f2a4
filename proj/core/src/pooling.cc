#include "svgauge/pooling.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "svgauge/error.h"

namespace svgauge {

PoolingStrategy PoolingStrategy::Parse(std::string_view text) {
  if (text == "cls") return Cls();
  if (text == "mean") return Mean();
  if (text.rfind("gem:", 0) == 0) {
    const std::string_view num = text.substr(4);
    double p = 0.0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), p);
    if (ec == std::errc() && ptr == num.data() + num.size() && std::isfinite(p)) {
      if (p < 1.0) {
        throw Error(ErrorCode::kInvalidExponent, "GeM exponent must be >= 1");
      }
      return Gem(p);
    }
  }
  throw Error(ErrorCode::kConfigError,
              "unknown pooling \"" + std::string(text) + "\" (expected cls, mean or gem:<p>)");
}

std::string PoolingStrategy::ToString() const {
  switch (kind) {
    case Kind::kCls: return "cls";
    case Kind::kMean: return "mean";
    case Kind::kGem: {
      std::ostringstream out;
      out << "gem:" << p;
      return out.str();
    }
  }
  return "mean";
}

EmbeddingVector Pool(const FeatureGrid& grid, const PoolingStrategy& strategy) {
  grid.Validate();
  EmbeddingVector out;
  out.kind = EmbeddingKind::kImage;
  const int n = grid.tokens();

  switch (strategy.kind) {
    case PoolingStrategy::Kind::kCls:
      if (!grid.cls) throw Error(ErrorCode::kMissingCls, "feature grid has no CLS token");
      out.values = *grid.cls;
      break;
    case PoolingStrategy::Kind::kMean: {
      out.values.assign(grid.dim, 0.0);
      for (int t = 0; t < n; ++t) {
        const auto token = grid.Token(t);
        for (int k = 0; k < grid.dim; ++k) out.values[k] += token[k];
      }
      for (double& v : out.values) v /= n;
      break;
    }
    case PoolingStrategy::Kind::kGem: {
      const double p = strategy.p;
      if (!(p >= 1.0) || !std::isfinite(p)) {
        throw Error(ErrorCode::kInvalidExponent, "GeM exponent must be >= 1");
      }
      // Scale by the per-dimension maximum before powering so large p cannot
      // overflow; the result is rescaled afterwards.
      out.values.assign(grid.dim, 0.0);
      for (int k = 0; k < grid.dim; ++k) {
        double peak = 0.0;
        for (int t = 0; t < n; ++t) peak = std::max(peak, grid.Token(t)[k]);
        if (peak == 0.0) continue;
        double acc = 0.0;
        for (int t = 0; t < n; ++t) {
          const double x = std::max(grid.Token(t)[k], 0.0);
          acc += p == 1.0 ? x / peak : std::pow(x / peak, p);
        }
        out.values[k] = peak * (p == 1.0 ? acc / n : std::pow(acc / n, 1.0 / p));
      }
      break;
    }
  }
  ValidateEmbedding(out);
  return out;
}

}  // namespace svgauge

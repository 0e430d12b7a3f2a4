#ifndef SVGAUGE_POOLING_H_
#define SVGAUGE_POOLING_H_

#include <string>
#include <string_view>

#include "svgauge/embedding.h"

namespace svgauge {

struct PoolingStrategy {
  enum class Kind { kCls, kMean, kGem };
  Kind kind = Kind::kMean;
  double p = 1.0;  // GeM exponent

  static PoolingStrategy Cls() { return {Kind::kCls, 1.0}; }
  static PoolingStrategy Mean() { return {Kind::kMean, 1.0}; }
  static PoolingStrategy Gem(double p) { return {Kind::kGem, p}; }

  // "cls", "mean", "gem:<p>"
  static PoolingStrategy Parse(std::string_view text);
  std::string ToString() const;
};

// Reduces a token grid to one image embedding.
//   mean   : per-dimension average over all h*w tokens (CLS excluded)
//   cls    : the CLS vector (Error{kMissingCls} if absent)
//   gem(p) : per-dimension ((1/hw) * sum max(x, 0)^p)^(1/p), p >= 1
//            (Error{kInvalidExponent} otherwise)
EmbeddingVector Pool(const FeatureGrid& grid, const PoolingStrategy& strategy);

}  // namespace svgauge

#endif  // SVGAUGE_POOLING_H_

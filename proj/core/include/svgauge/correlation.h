#ifndef SVGAUGE_CORRELATION_H_
#define SVGAUGE_CORRELATION_H_

#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace svgauge {

// nullopt marks an undefined coefficient (a constant input list).
struct CorrelationTriple {
  std::optional<double> spearman;
  std::optional<double> kendall;
  std::optional<double> pearson;

  bool defined() const { return spearman && kendall && pearson; }
};

// Average ranks, 1-based; tied values share the mean of their positions.
std::vector<double> MidRanks(std::span<const double> x);

std::optional<double> Pearson(std::span<const double> x, std::span<const double> y);
std::optional<double> Spearman(std::span<const double> x, std::span<const double> y);
// Tau-b, O(n log n).
std::optional<double> KendallTauB(std::span<const double> x, std::span<const double> y);

// Errors: kLengthMismatch, kTooFew (n < 2), kSchemaViolation on non-finite input.
CorrelationTriple Correlations(std::span<const double> x, std::span<const double> y);

// {"spearman":…,"kendall":…,"pearson":…}; values x100 unless raw, null when undefined.
nlohmann::ordered_json TripleToJson(const CorrelationTriple& t, bool raw = false);

}  // namespace svgauge

#endif  // SVGAUGE_CORRELATION_H_

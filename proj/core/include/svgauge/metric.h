#ifndef SVGAUGE_METRIC_H_
#define SVGAUGE_METRIC_H_

#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "svgauge/backend.h"
#include "svgauge/dataset.h"
#include "svgauge/error.h"
#include "svgauge/feature_transform.h"
#include "svgauge/pooling.h"
#include "svgauge/raster_image.h"
#include "svgauge/svg_document.h"
#include "svgauge/tfidf.h"

namespace svgauge {

inline constexpr double kDefaultAlpha = 0.6;
inline constexpr double kDefaultBeta = 0.4;

struct MetricConfig {
  double alpha = kDefaultAlpha;
  double beta = kDefaultBeta;
  PoolingStrategy pooling = PoolingStrategy::Mean();
  std::shared_ptr<const FeatureTransform> transform;  // unused in reference-free mode
  std::shared_ptr<const TfIdfModel> tfidf;
  std::shared_ptr<EmbeddingBackend> backend;
  double blank_tol = kDefaultBlankTolerance;
  int jobs = 1;

  // Throws Error{kConfigError} for negative weights, alpha + beta <= 0,
  // missing models, or a transform fitted on another backend / dimension.
  // Returns a warning (empty if none), e.g. when alpha + beta != 1.
  std::string Validate(bool reference_free = false) const;
};

enum class ScoreFlag {
  kBlankGeneration,
  kBlankReference,
  kEmptyCaption,
  kReferenceFree,
  kViewportFallback,
};

std::string_view FlagName(ScoreFlag flag);

struct ScoreReport {
  std::optional<double> s_image;  // S_I; absent in reference-free mode
  double s_text = 0.0;            // S_T
  double combined = 0.0;          // alpha * S_I + beta * S_T
  std::string caption;            // T_G
  std::set<ScoreFlag> flags;

  bool Has(ScoreFlag f) const { return flags.count(f) > 0; }
};

// alpha * s_image + beta * s_text; beta * s_text when s_image is absent.
double CombineScores(double alpha, double beta, std::optional<double> s_image, double s_text);

// Full reference-based pipeline. Propagates kRenderFailure,
// kBackendUnavailable, kDimensionMismatch; an empty caption is downgraded to
// the kEmptyCaption flag with S_T = 0.
ScoreReport ScorePair(std::string_view prompt, const SvgDocument& reference,
                      const SvgDocument& generated, const MetricConfig& cfg);

// Semantic branch only: combined = beta * S_T.
ScoreReport ScoreReferenceFree(std::string_view prompt, const SvgDocument& generated,
                               const MetricConfig& cfg);

struct BatchResult {
  std::string id;
  std::optional<ScoreReport> report;
  std::optional<ErrorCode> error;
  std::string error_message;

  bool ok() const { return report.has_value(); }
};

// Scores every record (reference-based unless `reference_free`), keeping
// input order. Per-record failures are captured; only configuration errors
// abort, before any record is scored. Records run concurrently up to
// min(cfg.jobs, backend max_in_flight).
std::vector<BatchResult> BatchScore(std::span<const EvaluationRecord> records,
                                    const MetricConfig& cfg, bool reference_free = false);

// One score-output line:
//   {"id":…,"s_image":…|null,"s_text":…,"svgauge":…,"caption":…,"flags":[…]}
// or {"id":…,"error":<code>,"message":…} for a failed record.
nlohmann::ordered_json BatchResultToJson(const BatchResult& result);
BatchResult BatchResultFromJson(const nlohmann::json& j);

}  // namespace svgauge

#endif  // SVGAUGE_METRIC_H_

#ifndef SVGAUGE_HARNESS_H_
#define SVGAUGE_HARNESS_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "svgauge/correlation.h"
#include "svgauge/dataset.h"
#include "svgauge/metric.h"
#include "svgauge/raster_image.h"

namespace svgauge {

struct GeneratorStats {
  std::string generator;
  int records = 0;
  int generated = 0;        // non-null payload
  int correct_syntax = 0;   // parsed and validated
  int rendered = 0;         // correct syntax and rasterized without error
  int render_failures = 0;
  int whites = 0;           // blank renders
  int rated = 0;
  std::optional<double> human_mean;

  // Percentages in [0, 100]; nullopt when the denominator is zero.
  std::optional<double> PercentGenerated() const;
  std::optional<double> PercentCorrectSyntax() const;
  std::optional<double> PercentWhites() const;
};

// One row per generator, in order of first appearance.
std::vector<GeneratorStats> DatasetStats(std::span<const EvaluationRecord> records,
                                         int resolution = 224,
                                         double blank_tol = kDefaultBlankTolerance,
                                         int jobs = 1);

// A record joined with its scores. Failed records are dropped by JoinScores.
struct ScoredRecord {
  std::string id;
  std::string generator;
  std::optional<double> human_score;
  std::optional<double> s_image;
  double s_text = 0.0;
  double combined = 0.0;

  double Reweighted(double alpha, double beta) const {
    return CombineScores(alpha, beta, s_image, s_text);
  }
};

// Matches by id. Errors: kSchemaViolation when a result has no record.
std::vector<ScoredRecord> JoinScores(std::span<const EvaluationRecord> records,
                                     std::span<const BatchResult> results);

// Combined score vs human score over rated records.
// Errors: kNoRatedRecords, plus Correlations' errors.
CorrelationTriple InstanceLevelEval(std::span<const ScoredRecord> scored);

struct SystemRow {
  std::string generator;
  int n = 0;  // rated scored records
  double metric_mean = 0.0;
  double human_mean = 0.0;
};

struct SystemLevelResult {
  std::vector<SystemRow> rows;
  CorrelationTriple triple;
};

// Per-generator means over rated scored records; correlation across
// generators. Errors: kTooFewGenerators (< 2 generators with rated records).
SystemLevelResult SystemLevelEval(std::span<const ScoredRecord> scored);

inline constexpr int kGridSteps = 11;  // P
inline constexpr int kGridCoefficients = 3;  // C

struct GridCell {
  double alpha = 0.0;
  double beta = 0.0;
  CorrelationTriple triple;
};

// alpha = 1.0, 0.9, …, 0.0 with beta = 1 - alpha; instance-level per cell.
// Errors: kConfigError when a record lacks S_I, kNoRatedRecords.
std::vector<GridCell> AlphaBetaGrid(std::span<const ScoredRecord> scored);

// (1 / (C * P)) * sum over cells of (S + K + P), raw scale.
// Errors: kUndefinedCorrelation if any cell has an undefined coefficient.
double AggregateScore(std::span<const GridCell> cells);

nlohmann::ordered_json StatsToJson(std::span<const GeneratorStats> stats);
nlohmann::ordered_json SystemLevelToJson(const SystemLevelResult& result, bool raw = false);
// {"cells":[{"alpha","beta","spearman","kendall","pearson"}…],"aggregate":…|null}
nlohmann::ordered_json GridToJson(std::span<const GridCell> cells, bool raw = false);

// Aligned text tables.
std::string StatsToTable(std::span<const GeneratorStats> stats);
std::string TripleToTable(const CorrelationTriple& t, bool raw = false);
std::string SystemLevelToTable(const SystemLevelResult& result, bool raw = false);
std::string GridToTable(std::span<const GridCell> cells, bool raw = false);

}  // namespace svgauge

#endif  // SVGAUGE_HARNESS_H_

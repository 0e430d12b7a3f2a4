#ifndef SVGAUGE_DATASET_H_
#define SVGAUGE_DATASET_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace svgauge {

enum class Split { kTrain, kTest };

std::string_view SplitName(Split s);
std::optional<Split> ParseSplit(std::string_view s);

// Inline markup or a file path (resolved against the dataset's directory).
struct SvgSource {
  std::optional<std::string> markup;
  std::optional<std::string> path;

  static SvgSource Inline(std::string markup) { return {std::move(markup), std::nullopt}; }
  static SvgSource File(std::string path) { return {std::nullopt, std::move(path)}; }

  // Returns the markup, reading the file if needed. Errors: kIoError.
  std::string Load() const;
};

struct EvaluationRecord {
  std::string id;
  std::string prompt;
  SvgSource reference;
  std::string generator;
  std::optional<SvgSource> generated;  // nullopt: the generator produced nothing
  std::optional<double> human_score;   // [1, 5]
  Split split = Split::kTest;
};

// Line-delimited JSON, one record per line:
//   {"id":…,"prompt":…,"reference_svg":"<markup>"|{"path":…},"generator":…,
//    "generated_svg":<same>|null,"human_score":1..5|null,"split":"train"|"test"}
// SVG payloads are not parsed here.
// Errors: kIoError, kSchemaViolation (message carries the line number),
// kDuplicateId.
std::vector<EvaluationRecord> LoadDataset(const std::string& path);

// Parses dataset text; relative SVG paths resolve against `base_dir`.
std::vector<EvaluationRecord> ParseDataset(std::string_view text, const std::string& base_dir,
                                           const std::string& source_name = "<dataset>");

std::vector<EvaluationRecord> FilterSplit(const std::vector<EvaluationRecord>& records,
                                          std::optional<Split> split);

}  // namespace svgauge

#endif  // SVGAUGE_DATASET_H_

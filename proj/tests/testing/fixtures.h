#ifndef SVGAUGE_TESTS_TESTING_FIXTURES_H_
#define SVGAUGE_TESTS_TESTING_FIXTURES_H_

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "svgauge/backend.h"
#include "svgauge/dataset.h"
#include "svgauge/pooling.h"
#include "svgauge/stub_backend.h"

namespace svgauge::testing {

// A flat drawing: one SVG element per shape on a 0..100 viewBox.
struct Icon {
  std::vector<std::string> shapes;
};

Icon RandomIcon(std::mt19937_64& rng, int min_shapes = 6, int max_shapes = 10);
std::string IconToSvg(const Icon& icon);
// Drops round(fraction * n) shapes, keeping at least one.
Icon DeleteGeometry(const Icon& icon, double fraction, std::mt19937_64& rng);

std::string RandomPrompt(std::mt19937_64& rng);
// Replaces round(fraction * words) words with off-topic words.
std::string NoisyCaption(const std::string& text, double fraction, std::mt19937_64& rng);

// Stub encoders plus a caption table keyed by image content key.
class ScriptedCaptionBackend : public EmbeddingBackend {
 public:
  explicit ScriptedCaptionBackend(StubBackendOptions options = {});

  const BackendDescriptor& descriptor() const override { return stub_.descriptor(); }
  void SetCaption(const RasterImage& img, std::string caption);

 protected:
  FeatureGrid DoImageFeatureGrid(const RasterImage& img) override;
  EmbeddingVector DoTextEmbedding(std::string_view text) override;
  std::string DoCaption(const RasterImage& img) override;

 private:
  StubBackend stub_;
  std::map<std::string, std::string> captions_;
};

struct FixtureRecord {
  std::string id;
  std::string prompt;
  std::string generator = "gen";
  std::string reference_svg;
  std::optional<std::string> generated_svg;
  std::optional<std::string> caption;  // for the generated image; default = prompt
  std::optional<double> human_score;
  Split split = Split::kTest;
};

struct ScenarioOptions {
  StubBackendOptions backend;
  PoolingStrategy pooling = PoolingStrategy::Mean();
  int components = 128;
  bool whiten = true;
};

// Everything a hermetic run needs, written under `dir`.
struct Scenario {
  std::string dir;
  std::string dataset;  // JSONL
  std::string cache;    // embedding cache JSONL
  std::string pca;
  std::string tfidf;
  std::string backend_spec;  // "cache:<path>"
};

// Writes the dataset, records every backend output the pipeline will ask for
// into a cache, and fits PCA (train references) and TF-IDF (train prompts).
Scenario BuildScenario(const std::string& dir, const std::vector<FixtureRecord>& records,
                       const ScenarioOptions& options = {});

std::string DatasetLine(const FixtureRecord& r);

// Identity records (generated == reference, caption == prompt, human 5)
// plus copies of one mismatched pair rated 1. Half the identity records are
// train split.
std::vector<FixtureRecord> IdentityGridRecords(int identity, int mismatched, uint64_t seed);

// Three generators built from the same references with 0%, 30% and 60%
// geometry deletion and caption noise; human scores 5, 3, 1.
std::vector<FixtureRecord> CorruptionRecords(int per_generator, uint64_t seed);

// A fresh empty directory under the system temp dir.
std::string MakeTempDir(const std::string& tag);

}  // namespace svgauge::testing

#endif  // SVGAUGE_TESTS_TESTING_FIXTURES_H_

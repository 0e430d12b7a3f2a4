#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.h"
#include "svgauge/caching_backend.h"
#include "svgauge/error.h"
#include "svgauge/feature_transform.h"
#include "svgauge/metric.h"
#include "svgauge/rasterizer.h"
#include "svgauge/stub_backend.h"
#include "svgauge/svg_document.h"
#include "svgauge/tfidf.h"

namespace svgauge {
namespace {

using testing::FixtureRecord;
using testing::IconToSvg;
using testing::RandomIcon;
using testing::RandomPrompt;
using testing::ScriptedCaptionBackend;

// Image features chosen per picture, so S_I can be dialled in exactly.
class ControlledBackend : public EmbeddingBackend {
 public:
  ControlledBackend() { descriptor_ = {"controlled", 8, 2, 32, 4}; }
  const BackendDescriptor& descriptor() const override { return descriptor_; }

  void SetFeature(const RasterImage& img, std::vector<double> f) {
    features_[ImageContentKey(img, descriptor_.name)] = std::move(f);
  }
  void SetCaption(const RasterImage& img, std::string c) {
    captions_[ImageContentKey(img, descriptor_.name)] = std::move(c);
  }

 protected:
  FeatureGrid DoImageFeatureGrid(const RasterImage& img) override {
    FeatureGrid g;
    g.h = g.w = 1;
    g.dim = 2;
    auto it = features_.find(ImageContentKey(img, descriptor_.name));
    g.data = it == features_.end() ? std::vector<double>{1, 0} : it->second;
    return g;
  }
  EmbeddingVector DoTextEmbedding(std::string_view text) override {
    return text_.TextEmbedding(text);
  }
  std::string DoCaption(const RasterImage& img) override {
    return captions_.at(ImageContentKey(img, descriptor_.name));
  }

 private:
  BackendDescriptor descriptor_;
  StubBackend text_;
  std::map<std::string, std::vector<double>> features_;
  std::map<std::string, std::string> captions_;
};

std::shared_ptr<FeatureTransform> IdentityTransform(int dim, const std::string& backend) {
  auto t = std::make_shared<FeatureTransform>();
  t->input_dim = t->components = dim;
  t->mean.assign(dim, 0.0);
  t->eigenvectors.assign(dim, std::vector<double>(dim, 0.0));
  for (int i = 0; i < dim; ++i) t->eigenvectors[i][i] = 1.0;
  t->eigenvalues.assign(dim, 1.0);
  t->whiten = false;
  t->backend_name = backend;
  return t;
}

// A scripted stub world with fitted models.
struct World {
  std::shared_ptr<ScriptedCaptionBackend> scripted = std::make_shared<ScriptedCaptionBackend>();
  MetricConfig cfg;
  std::vector<std::string> svgs;
  std::vector<std::string> prompts;

  explicit World(int n = 12, uint64_t seed = 3) {
    std::mt19937_64 rng(seed);
    std::vector<EmbeddingVector> pooled;
    for (int i = 0; i < n; ++i) {
      svgs.push_back(IconToSvg(RandomIcon(rng)));
      prompts.push_back(RandomPrompt(rng));
      const RasterImage img = Render(svgs.back());
      scripted->SetCaption(img, prompts.back());
      pooled.push_back(Pool(scripted->ImageFeatureGrid(img), PoolingStrategy::Mean()));
    }
    cfg.backend = std::make_shared<CachingBackend>(scripted);
    cfg.transform = std::make_shared<FeatureTransform>(
        FitFeatureTransform(pooled, 128, true, scripted->descriptor().name));
    cfg.tfidf = std::make_shared<TfIdfModel>(FitTfIdf(prompts));
  }

  RasterImage Render(const std::string& svg) const {
    return Rasterize(ParseAndValidate(svg), scripted->descriptor().image_input_resolution);
  }
};

TEST(ScorePair, IdentityPairGivesAlphaPlusBeta) {
  World w;
  const SvgDocument doc = ParseAndValidate(w.svgs[0]);
  for (int i = 0; i <= 10; ++i) {
    w.cfg.alpha = (10 - i) / 10.0;
    w.cfg.beta = i / 10.0;
    const ScoreReport r = ScorePair(w.prompts[0], doc, doc, w.cfg);
    ASSERT_TRUE(r.s_image);
    EXPECT_NEAR(*r.s_image, 1.0, 1e-12);
    EXPECT_NEAR(r.s_text, 1.0, 1e-12);
    EXPECT_NEAR(r.combined, w.cfg.alpha + w.cfg.beta, 1e-12);
    EXPECT_EQ(r.caption, w.prompts[0]);
    EXPECT_TRUE(r.flags.empty());
  }
}

TEST(ScorePair, WeightedSumArithmetic) {
  auto backend = std::make_shared<ControlledBackend>();
  const std::string ref_svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 2 2\"><rect width=\"1\" "
      "height=\"1\"/></svg>";
  const std::string gen_svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 2 2\"><circle cx=\"1\" cy=\"1\" "
      "r=\"1\"/></svg>";
  const SvgDocument ref = ParseAndValidate(ref_svg), gen = ParseAndValidate(gen_svg);
  const RasterImage gen_img = Rasterize(gen, 8);
  backend->SetFeature(Rasterize(ref, 8), {1.0, 0.0});
  backend->SetFeature(gen_img, {0.5, std::sqrt(0.75)});
  backend->SetCaption(gen_img, "a black circle");
  const std::vector<std::string> corpus = {"a black circle", "a square"};

  MetricConfig cfg;
  cfg.backend = backend;
  cfg.transform = IdentityTransform(2, "controlled");
  cfg.tfidf = std::make_shared<TfIdfModel>(FitTfIdf(corpus));
  const ScoreReport r = ScorePair("a black circle", ref, gen, cfg);
  EXPECT_NEAR(*r.s_image, 0.5, 1e-15);
  EXPECT_NEAR(r.s_text, 1.0, 1e-15);
  EXPECT_NEAR(r.combined, 0.7, 1e-15);
  EXPECT_EQ(r.combined, CombineScores(0.6, 0.4, r.s_image, r.s_text));
}

TEST(ScorePair, EmptyCaptionBecomesFlag) {
  auto backend = std::make_shared<ControlledBackend>();
  const SvgDocument doc = ParseAndValidate(
      "<svg xmlns=\"http://www.w3.org/2000/svg\"><rect width=\"3\" height=\"2\"/></svg>");
  backend->SetCaption(Rasterize(doc, 8), "");
  const std::vector<std::string> corpus = {"a box"};
  MetricConfig cfg;
  cfg.backend = backend;
  cfg.transform = IdentityTransform(2, "controlled");
  cfg.tfidf = std::make_shared<TfIdfModel>(FitTfIdf(corpus));
  const ScoreReport r = ScorePair("a box", doc, doc, cfg);
  EXPECT_TRUE(r.Has(ScoreFlag::kEmptyCaption));
  EXPECT_EQ(r.s_text, 0.0);
  EXPECT_NEAR(r.combined, 0.6, 1e-15);

  cfg.alpha = 0.0;
  cfg.beta = 1.0;
  const ScoreReport free = ScoreReferenceFree("a box", doc, cfg);
  EXPECT_EQ(free.s_text, 0.0);
  EXPECT_EQ(free.combined, 0.0);
  EXPECT_TRUE(free.Has(ScoreFlag::kEmptyCaption));
}

TEST(ScoreReferenceFree, CaptionEqualsPrompt) {
  World w;
  w.cfg.alpha = 0.0;
  w.cfg.beta = 1.0;
  const SvgDocument doc = ParseAndValidate(w.svgs[1]);
  const ScoreReport r = ScoreReferenceFree(w.prompts[1], doc, w.cfg);
  EXPECT_FALSE(r.s_image);
  EXPECT_TRUE(r.Has(ScoreFlag::kReferenceFree));
  EXPECT_NEAR(r.s_text, 1.0, 1e-12);
  EXPECT_NEAR(r.combined, 1.0, 1e-12);

  w.cfg.beta = 0.7;
  const SvgDocument other = ParseAndValidate(w.svgs[2]);
  const ScoreReport a = ScorePair(w.prompts[1], other, doc, w.cfg);
  const ScoreReport b = ScoreReferenceFree(w.prompts[1], doc, w.cfg);
  EXPECT_EQ(a.combined, b.combined);
}

TEST(ScorePair, BlankGenerationIsFlaggedAndStillScored) {
  World w;
  const SvgDocument blank = ParseAndValidate("<svg xmlns=\"http://www.w3.org/2000/svg\"/>");
  w.scripted->SetCaption(w.Render("<svg xmlns=\"http://www.w3.org/2000/svg\"/>"), "nothing");
  const ScoreReport r = ScorePair(w.prompts[0], ParseAndValidate(w.svgs[0]), blank, w.cfg);
  EXPECT_TRUE(r.Has(ScoreFlag::kBlankGeneration));
  EXPECT_FALSE(r.Has(ScoreFlag::kBlankReference));
  EXPECT_EQ(r.caption, "nothing");
  EXPECT_LT(r.combined, 1.0);
}

TEST(ScorePair, PropagatesErrors) {
  World w;
  const SvgDocument ok = ParseAndValidate(w.svgs[0]);
  const SvgDocument unrenderable = ParseAndValidate(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 0 0\"/>");
  try {
    ScorePair(w.prompts[0], ok, unrenderable, w.cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRenderFailure);
  }
  // No scripted caption for this picture.
  std::mt19937_64 rng(99);
  const SvgDocument unknown = ParseAndValidate(IconToSvg(RandomIcon(rng)));
  try {
    ScorePair(w.prompts[0], ok, unknown, w.cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBackendUnavailable);
  }
}

TEST(MetricConfig, Validation) {
  World w;
  EXPECT_EQ(w.cfg.Validate(), "");
  MetricConfig c = w.cfg;
  c.alpha = 0.5;
  c.beta = 0.7;
  EXPECT_FALSE(c.Validate().empty());
  auto code = [](const MetricConfig& cfg, bool free = false) {
    try {
      cfg.Validate(free);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIoError;
  };
  c = w.cfg;
  c.alpha = -0.1;
  EXPECT_EQ(code(c), ErrorCode::kConfigError);
  c = w.cfg;
  c.alpha = c.beta = 0.0;
  EXPECT_EQ(code(c), ErrorCode::kConfigError);
  c = w.cfg;
  c.transform = nullptr;
  EXPECT_EQ(code(c), ErrorCode::kConfigError);
  EXPECT_EQ(code(c, true), ErrorCode::kIoError);
  c = w.cfg;
  c.transform = IdentityTransform(3, w.scripted->descriptor().name);
  EXPECT_EQ(code(c), ErrorCode::kConfigError);
  c = w.cfg;
  c.transform = IdentityTransform(w.scripted->descriptor().image_dim, "another-model");
  EXPECT_EQ(code(c), ErrorCode::kConfigError);
}

std::vector<EvaluationRecord> Records(const World& w, int n) {
  std::vector<EvaluationRecord> out;
  for (int i = 0; i < n; ++i) {
    EvaluationRecord r;
    r.id = "r" + std::to_string(i);
    r.prompt = w.prompts[i % w.prompts.size()];
    r.reference = SvgSource::Inline(w.svgs[i % w.svgs.size()]);
    r.generated = SvgSource::Inline(w.svgs[i % w.svgs.size()]);
    r.generator = "g";
    out.push_back(std::move(r));
  }
  return out;
}

TEST(BatchScore, IdentityRecords) {
  World w;
  const auto records = Records(w, 3);
  const auto results = BatchScore(records, w.cfg);
  ASSERT_EQ(results.size(), 3u);
  for (size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(results[i].id, records[i].id);
    ASSERT_TRUE(results[i].ok());
    EXPECT_NEAR(results[i].report->combined, 1.0, 1e-12);
  }
}

TEST(BatchScore, IsolatesRecordErrors) {
  World w;
  auto records = Records(w, 4);
  records[1].generated = SvgSource::Inline("<svg><rect>");
  records[2].generated.reset();
  const auto results = BatchScore(records, w.cfg);
  ASSERT_EQ(results.size(), 4u);
  EXPECT_TRUE(results[0].ok());
  EXPECT_EQ(results[1].error, ErrorCode::kMalformedMarkup);
  EXPECT_EQ(results[2].error, ErrorCode::kGenerationMissing);
  EXPECT_TRUE(results[3].ok());
}

TEST(BatchScore, ConfigErrorAbortsBeforeScoring) {
  World w;
  w.cfg.tfidf = nullptr;
  EXPECT_THROW(BatchScore(Records(w, 2), w.cfg), Error);
}

TEST(BatchScore, ParallelRunMatchesSerial) {
  World w(20, 8);
  auto records = Records(w, 40);
  // Pair record i's prompt with another picture.
  for (size_t i = 0; i < records.size(); i += 3) {
    records[i].reference = SvgSource::Inline(w.svgs[(i + 5) % w.svgs.size()]);
  }
  w.cfg.jobs = 1;
  const auto serial = BatchScore(records, w.cfg);
  World fresh(20, 8);
  fresh.cfg.jobs = 6;
  const auto parallel = BatchScore(records, fresh.cfg);
  ASSERT_EQ(serial.size(), parallel.size());
  for (size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(BatchResultToJson(serial[i]).dump(), BatchResultToJson(parallel[i]).dump());
  }
}

TEST(BatchResult, JsonRoundTrip) {
  BatchResult ok{"a", ScoreReport{0.25, 0.5, 0.35, "cap", {ScoreFlag::kBlankGeneration}},
                 std::nullopt, ""};
  const nlohmann::ordered_json j = BatchResultToJson(ok);
  EXPECT_EQ(j.dump(),
            R"({"id":"a","s_image":0.25,"s_text":0.5,"svgauge":0.35,"caption":"cap",)"
            R"("flags":["blank_generation"]})");
  const BatchResult back = BatchResultFromJson(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.report->s_image, 0.25);
  EXPECT_TRUE(back.report->Has(ScoreFlag::kBlankGeneration));

  BatchResult free{"b", ScoreReport{std::nullopt, 1.0, 1.0, "c", {ScoreFlag::kReferenceFree}},
                   std::nullopt, ""};
  EXPECT_TRUE(BatchResultToJson(free)["s_image"].is_null());

  BatchResult failed{"c", std::nullopt, ErrorCode::kMalformedMarkup, "bad"};
  const BatchResult failed_back =
      BatchResultFromJson(nlohmann::json::parse(BatchResultToJson(failed).dump()));
  EXPECT_EQ(failed_back.error, ErrorCode::kMalformedMarkup);
}

}  // namespace
}  // namespace svgauge

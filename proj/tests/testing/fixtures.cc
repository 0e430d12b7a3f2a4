#include "fixtures.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "svgauge/cache_backend.h"
#include "svgauge/caching_backend.h"
#include "svgauge/error.h"
#include "svgauge/feature_transform.h"
#include "svgauge/rasterizer.h"
#include "svgauge/svg_document.h"
#include "svgauge/tfidf.h"

namespace svgauge::testing {
namespace {

const char* const kColors[] = {"red", "blue", "green", "orange", "purple", "black", "teal", "gold"};
const char* const kHex[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e",
                            "#9467bd", "#111111", "#17becf", "#e6b800"};
const char* const kObjects[] = {"house", "tree", "rocket", "cat", "flower", "car", "sun",
                                "boat", "robot", "cup", "key", "bell"};
const char* const kAdjectives[] = {"small", "large", "simple", "bold", "flat", "round", "tall"};
const char* const kDetails[] = {"stripes", "dots", "windows", "leaves", "wheels", "stars"};
const char* const kNoise[] = {"quantum", "banana", "violin", "glacier", "spreadsheet",
                              "tuxedo", "harbor", "pixel", "walrus", "origami", "tundra"};

template <size_t N>
const char* Pick(const char* const (&items)[N], std::mt19937_64& rng) {
  return items[std::uniform_int_distribution<size_t>(0, N - 1)(rng)];
}

double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

std::string RandomShape(std::mt19937_64& rng) {
  const std::string color = Pick(kHex, rng);
  const double x = Uniform(rng, 10, 90), y = Uniform(rng, 10, 90);
  switch (std::uniform_int_distribution<int>(0, 4)(rng)) {
    case 0:
      return "<circle cx=\"" + Num(x) + "\" cy=\"" + Num(y) + "\" r=\"" +
             Num(Uniform(rng, 5, 18)) + "\" fill=\"" + color + "\"/>";
    case 1:
      return "<rect x=\"" + Num(x - 10) + "\" y=\"" + Num(y - 8) + "\" width=\"" +
             Num(Uniform(rng, 8, 30)) + "\" height=\"" + Num(Uniform(rng, 8, 30)) +
             "\" fill=\"" + color + "\"/>";
    case 2:
      return "<ellipse cx=\"" + Num(x) + "\" cy=\"" + Num(y) + "\" rx=\"" +
             Num(Uniform(rng, 6, 20)) + "\" ry=\"" + Num(Uniform(rng, 4, 12)) + "\" fill=\"" +
             color + "\"/>";
    case 3:
      return "<polygon points=\"" + Num(x) + "," + Num(y - 12) + " " + Num(x + 12) + "," +
             Num(y + 10) + " " + Num(x - 12) + "," + Num(y + 10) + "\" fill=\"" + color + "\"/>";
    default:
      return "<path d=\"M" + Num(x - 15) + " " + Num(y) + " Q" + Num(x) + " " +
             Num(y - 20) + " " + Num(x + 15) + " " + Num(y) + "\" fill=\"none\" stroke=\"" +
             color + "\" stroke-width=\"" + Num(Uniform(rng, 2, 6)) + "\"/>";
  }
}

std::vector<std::string> Words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

}  // namespace

Icon RandomIcon(std::mt19937_64& rng, int min_shapes, int max_shapes) {
  Icon icon;
  const int n = std::uniform_int_distribution<int>(min_shapes, max_shapes)(rng);
  for (int i = 0; i < n; ++i) icon.shapes.push_back(RandomShape(rng));
  return icon;
}

std::string IconToSvg(const Icon& icon) {
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 100 100\">";
  for (const auto& s : icon.shapes) svg += s;
  return svg + "</svg>";
}

Icon DeleteGeometry(const Icon& icon, double fraction, std::mt19937_64& rng) {
  const size_t n = icon.shapes.size();
  size_t drop = static_cast<size_t>(std::lround(fraction * static_cast<double>(n)));
  drop = std::min(drop, n - 1);
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> dropped(n, false);
  for (size_t i = 0; i < drop; ++i) dropped[order[i]] = true;
  Icon out;
  for (size_t i = 0; i < n; ++i) {
    if (!dropped[i]) out.shapes.push_back(icon.shapes[i]);
  }
  return out;
}

std::string RandomPrompt(std::mt19937_64& rng) {
  return std::string("a ") + Pick(kAdjectives, rng) + " " + Pick(kColors, rng) + " " +
         Pick(kObjects, rng) + " with " + Pick(kColors, rng) + " " + Pick(kDetails, rng) +
         " icon";
}

std::string NoisyCaption(const std::string& text, double fraction, std::mt19937_64& rng) {
  std::vector<std::string> words = Words(text);
  const size_t k = static_cast<size_t>(std::lround(fraction * static_cast<double>(words.size())));
  std::vector<size_t> order(words.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  for (size_t i = 0; i < k && i < order.size(); ++i) words[order[i]] = Pick(kNoise, rng);
  std::string out;
  for (const auto& w : words) out += (out.empty() ? "" : " ") + w;
  return out;
}

ScriptedCaptionBackend::ScriptedCaptionBackend(StubBackendOptions options)
    : stub_(std::move(options)) {}

void ScriptedCaptionBackend::SetCaption(const RasterImage& img, std::string caption) {
  captions_[ImageContentKey(img, descriptor().name)] = std::move(caption);
}

FeatureGrid ScriptedCaptionBackend::DoImageFeatureGrid(const RasterImage& img) {
  return stub_.ImageFeatureGrid(img);
}

EmbeddingVector ScriptedCaptionBackend::DoTextEmbedding(std::string_view text) {
  return stub_.TextEmbedding(text);
}

std::string ScriptedCaptionBackend::DoCaption(const RasterImage& img) {
  auto it = captions_.find(ImageContentKey(img, descriptor().name));
  if (it == captions_.end()) throw Error(ErrorCode::kBackendUnavailable, "no scripted caption");
  return it->second;
}

std::string DatasetLine(const FixtureRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["prompt"] = r.prompt;
  j["reference_svg"] = r.reference_svg;
  j["generator"] = r.generator;
  j["generated_svg"] = r.generated_svg ? nlohmann::ordered_json(*r.generated_svg)
                                       : nlohmann::ordered_json(nullptr);
  j["human_score"] =
      r.human_score ? nlohmann::ordered_json(*r.human_score) : nlohmann::ordered_json(nullptr);
  j["split"] = std::string(SplitName(r.split));
  return j.dump();
}

Scenario BuildScenario(const std::string& dir, const std::vector<FixtureRecord>& records,
                       const ScenarioOptions& options) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  Scenario sc;
  sc.dir = dir;
  sc.dataset = (fs::path(dir) / "dataset.jsonl").string();
  sc.cache = (fs::path(dir) / "cache.jsonl").string();
  sc.pca = (fs::path(dir) / "pca.json").string();
  sc.tfidf = (fs::path(dir) / "tfidf.json").string();
  sc.backend_spec = "cache:" + sc.cache;

  {
    std::ofstream out(sc.dataset);
    for (const auto& r : records) out << DatasetLine(r) << "\n";
  }

  auto scripted = std::make_shared<ScriptedCaptionBackend>(options.backend);
  const int res = scripted->descriptor().image_input_resolution;
  auto render = [&](const std::string& svg) -> std::optional<RasterImage> {
    try {
      return Rasterize(ParseAndValidate(svg), res);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  for (const auto& r : records) {
    if (!r.generated_svg) continue;
    if (auto img = render(*r.generated_svg)) scripted->SetCaption(*img, r.caption.value_or(r.prompt));
  }

  fs::remove(sc.cache);
  auto writer = std::make_shared<CacheFileWriter>(sc.cache, scripted->descriptor());
  CachingBackend backend(scripted, writer);
  std::vector<EmbeddingVector> pca_corpus, pca_fallback;
  std::vector<std::string> train_prompts, all_prompts;
  for (const auto& r : records) {
    backend.TextEmbedding(r.prompt);
    all_prompts.push_back(r.prompt);
    if (auto img = render(r.reference_svg)) {
      EmbeddingVector pooled = Pool(backend.ImageFeatureGrid(*img), options.pooling);
      if (r.split == Split::kTrain) pca_corpus.push_back(pooled);
      pca_fallback.push_back(std::move(pooled));
    }
    if (r.split == Split::kTrain) train_prompts.push_back(r.prompt);
    if (!r.generated_svg) continue;
    if (auto img = render(*r.generated_svg)) {
      backend.ImageFeatureGrid(*img);
      backend.TextEmbedding(backend.Caption(*img));
    }
  }

  FitTfIdf(train_prompts.empty() ? all_prompts : train_prompts).Save(sc.tfidf);
  FitFeatureTransform(pca_corpus.empty() ? pca_fallback : pca_corpus, options.components,
                      options.whiten, scripted->descriptor().name)
      .Save(sc.pca);
  return sc;
}

std::vector<FixtureRecord> IdentityGridRecords(int identity, int mismatched, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<FixtureRecord> out;
  for (int i = 0; i < identity; ++i) {
    FixtureRecord r;
    r.id = "identity-" + std::to_string(i);
    r.prompt = RandomPrompt(rng);
    r.generator = "gen-" + std::to_string(i % 3);
    r.reference_svg = IconToSvg(RandomIcon(rng));
    r.generated_svg = r.reference_svg;
    r.human_score = 5.0;
    r.split = i % 2 == 0 ? Split::kTrain : Split::kTest;
    out.push_back(std::move(r));
  }
  const std::string ref = IconToSvg(RandomIcon(rng));
  const std::string gen = IconToSvg(RandomIcon(rng));
  const std::string prompt = RandomPrompt(rng);
  const std::string caption = NoisyCaption(prompt, 0.6, rng);
  for (int i = 0; i < mismatched; ++i) {
    FixtureRecord r;
    r.id = "mismatch-" + std::to_string(i);
    r.prompt = prompt;
    r.generator = "gen-" + std::to_string(i % 3);
    r.reference_svg = ref;
    r.generated_svg = gen;
    r.caption = caption;
    r.human_score = 1.0;
    r.split = Split::kTest;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<FixtureRecord> CorruptionRecords(int per_generator, uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double levels[] = {0.0, 0.3, 0.6};
  const double human[] = {5.0, 3.0, 1.0};
  std::vector<FixtureRecord> out;
  for (int i = 0; i < per_generator; ++i) {
    const Icon icon = RandomIcon(rng, 8, 12);
    const std::string prompt = RandomPrompt(rng);
    // The train split carries the clean references for fitting.
    FixtureRecord train;
    train.id = "train-" + std::to_string(i);
    train.prompt = prompt;
    train.generator = "reference";
    train.reference_svg = IconToSvg(icon);
    train.generated_svg = train.reference_svg;
    train.split = Split::kTrain;
    out.push_back(train);
    for (int g = 0; g < 3; ++g) {
      FixtureRecord r;
      r.id = "corrupt" + std::to_string(g) + "-" + std::to_string(i);
      r.prompt = prompt;
      r.generator = "corrupt-" + std::to_string(static_cast<int>(levels[g] * 100));
      r.reference_svg = IconToSvg(icon);
      r.generated_svg = IconToSvg(DeleteGeometry(icon, levels[g], rng));
      r.caption = NoisyCaption(prompt, levels[g], rng);
      r.human_score = human[g];
      r.split = Split::kTest;
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::string MakeTempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("svgauge-" + tag + "-" + std::to_string(::getpid()) + "-" +
                    std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace svgauge::testing

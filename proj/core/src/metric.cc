#include "svgauge/metric.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "svgauge/rasterizer.h"

namespace svgauge {
namespace {

struct ImageBranch {
  RasterImage raster;
  bool blank = false;
  bool viewport_fallback = false;
};

ImageBranch RenderForBackend(const SvgDocument& doc, const MetricConfig& cfg) {
  RasterizeInfo info;
  RasterImage img = Rasterize(doc, cfg.backend->descriptor().image_input_resolution, &info);
  const bool blank = IsBlank(img, cfg.blank_tol);
  return {std::move(img), blank, info.viewport_from_geometry};
}

EmbeddingVector ImageEmbedding(const RasterImage& img, const MetricConfig& cfg) {
  const FeatureGrid grid = cfg.backend->ImageFeatureGrid(img);
  return ApplyFeatureTransform(*cfg.transform, Pool(grid, cfg.pooling));
}

// Captions first, then text embeddings; EmptyCaption becomes a flag.
void SemanticBranch(std::string_view prompt, const RasterImage& generated,
                    const MetricConfig& cfg, ScoreReport& report) {
  try {
    report.caption = cfg.backend->Caption(generated);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kEmptyCaption) throw;
    report.flags.insert(ScoreFlag::kEmptyCaption);
    report.caption.clear();
    report.s_text = 0.0;
    return;
  }
  const EmbeddingVector e_ref = cfg.backend->TextEmbedding(prompt);
  const EmbeddingVector e_gen = cfg.backend->TextEmbedding(report.caption);
  report.s_text = SemanticSimilarity(e_ref, e_gen, TfIdfVectorize(*cfg.tfidf, prompt),
                                     TfIdfVectorize(*cfg.tfidf, report.caption));
}

}  // namespace

std::string MetricConfig::Validate(bool reference_free) const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kConfigError, msg); };
  if (!(alpha >= 0) || !(beta >= 0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    fail("alpha and beta must be finite and >= 0");
  }
  if (!(alpha + beta > 0)) fail("alpha + beta must be positive");
  if (!(blank_tol >= 0 && blank_tol < 1)) fail("blank tolerance must lie in [0, 1)");
  if (!backend) fail("no backend configured");
  if (!tfidf) fail("no TF-IDF model configured");
  if (jobs < 1) fail("jobs must be >= 1");
  if (!reference_free) {
    if (!transform) fail("no feature transform configured");
    const BackendDescriptor& d = backend->descriptor();
    if (transform->input_dim != d.image_dim) {
      fail("feature transform expects dim " + std::to_string(transform->input_dim) +
           " but backend " + d.name + " produces " + std::to_string(d.image_dim));
    }
    if (!transform->backend_name.empty() && transform->backend_name != d.name) {
      fail("feature transform was fitted on backend " + transform->backend_name +
           ", not " + d.name);
    }
  }
  if (std::abs(alpha + beta - 1.0) > 1e-12) {
    return "alpha + beta = " + std::to_string(alpha + beta) + " (conventionally 1)";
  }
  return {};
}

std::string_view FlagName(ScoreFlag flag) {
  switch (flag) {
    case ScoreFlag::kBlankGeneration: return "blank_generation";
    case ScoreFlag::kBlankReference: return "blank_reference";
    case ScoreFlag::kEmptyCaption: return "empty_caption";
    case ScoreFlag::kReferenceFree: return "reference_free";
    case ScoreFlag::kViewportFallback: return "viewbox_fallback";
  }
  return "unknown";
}

double CombineScores(double alpha, double beta, std::optional<double> s_image, double s_text) {
  if (!s_image) return beta * s_text;
  return alpha * *s_image + beta * s_text;
}

ScoreReport ScorePair(std::string_view prompt, const SvgDocument& reference,
                      const SvgDocument& generated, const MetricConfig& cfg) {
  ScoreReport report;
  const ImageBranch ref = RenderForBackend(reference, cfg);
  const ImageBranch gen = RenderForBackend(generated, cfg);
  if (ref.blank) report.flags.insert(ScoreFlag::kBlankReference);
  if (gen.blank) report.flags.insert(ScoreFlag::kBlankGeneration);
  if (ref.viewport_fallback || gen.viewport_fallback) {
    report.flags.insert(ScoreFlag::kViewportFallback);
  }
  SemanticBranch(prompt, gen.raster, cfg, report);
  report.s_image = VisualSimilarity(ImageEmbedding(ref.raster, cfg),
                                    ImageEmbedding(gen.raster, cfg));
  report.combined = CombineScores(cfg.alpha, cfg.beta, report.s_image, report.s_text);
  return report;
}

ScoreReport ScoreReferenceFree(std::string_view prompt, const SvgDocument& generated,
                               const MetricConfig& cfg) {
  ScoreReport report;
  report.flags.insert(ScoreFlag::kReferenceFree);
  const ImageBranch gen = RenderForBackend(generated, cfg);
  if (gen.blank) report.flags.insert(ScoreFlag::kBlankGeneration);
  if (gen.viewport_fallback) report.flags.insert(ScoreFlag::kViewportFallback);
  SemanticBranch(prompt, gen.raster, cfg, report);
  report.combined = CombineScores(cfg.alpha, cfg.beta, std::nullopt, report.s_text);
  return report;
}

std::vector<BatchResult> BatchScore(std::span<const EvaluationRecord> records,
                                    const MetricConfig& cfg, bool reference_free) {
  cfg.Validate(reference_free);
  std::vector<BatchResult> results(records.size());

  auto score_one = [&](size_t i) {
    const EvaluationRecord& rec = records[i];
    BatchResult& out = results[i];
    out.id = rec.id;
    try {
      if (!rec.generated) {
        throw Error(ErrorCode::kGenerationMissing, "record has no generated SVG");
      }
      const SvgDocument gen = ParseAndValidate(rec.generated->Load(), rec.id + "/generated");
      if (reference_free) {
        out.report = ScoreReferenceFree(rec.prompt, gen, cfg);
      } else {
        const SvgDocument ref = ParseAndValidate(rec.reference.Load(), rec.id + "/reference");
        out.report = ScorePair(rec.prompt, ref, gen, cfg);
      }
    } catch (const Error& e) {
      out.error = e.code();
      out.error_message = e.what();
    }
  };

  const int workers = std::max(
      1, std::min({cfg.jobs, cfg.backend->descriptor().max_in_flight,
                   static_cast<int>(std::max<size_t>(records.size(), 1))}));
  if (workers == 1) {
    for (size_t i = 0; i < records.size(); ++i) score_one(i);
    return results;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < records.size(); i = next++) score_one(i);
    });
  }
  for (auto& t : pool) t.join();
  return results;
}

nlohmann::ordered_json BatchResultToJson(const BatchResult& result) {
  nlohmann::ordered_json j;
  j["id"] = result.id;
  if (!result.report) {
    j["error"] = result.error ? std::string(ErrorCodeName(*result.error)) : "Unknown";
    j["message"] = result.error_message;
    return j;
  }
  const ScoreReport& r = *result.report;
  j["s_image"] = r.s_image ? nlohmann::ordered_json(*r.s_image) : nlohmann::ordered_json(nullptr);
  j["s_text"] = r.s_text;
  j["svgauge"] = r.combined;
  j["caption"] = r.caption;
  nlohmann::ordered_json flags = nlohmann::ordered_json::array();
  for (ScoreFlag f : r.flags) flags.push_back(std::string(FlagName(f)));
  j["flags"] = std::move(flags);
  return j;
}

BatchResult BatchResultFromJson(const nlohmann::json& j) {
  BatchResult result;
  try {
    result.id = j.at("id").get<std::string>();
    if (j.contains("error")) {
      const std::string code = j.at("error").get<std::string>();
      result.error = ErrorCode::kSchemaViolation;
      for (int c = 0; c <= static_cast<int>(ErrorCode::kIoError); ++c) {
        if (ErrorCodeName(static_cast<ErrorCode>(c)) == code) {
          result.error = static_cast<ErrorCode>(c);
        }
      }
      result.error_message = j.value("message", "");
      return result;
    }
    ScoreReport r;
    if (!j.at("s_image").is_null()) r.s_image = j.at("s_image").get<double>();
    r.s_text = j.at("s_text").get<double>();
    r.combined = j.at("svgauge").get<double>();
    r.caption = j.at("caption").get<std::string>();
    for (const auto& f : j.at("flags")) {
      const std::string name = f.get<std::string>();
      for (ScoreFlag flag : {ScoreFlag::kBlankGeneration, ScoreFlag::kBlankReference,
                             ScoreFlag::kEmptyCaption, ScoreFlag::kReferenceFree,
                             ScoreFlag::kViewportFallback}) {
        if (FlagName(flag) == name) r.flags.insert(flag);
      }
    }
    result.report = std::move(r);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, std::string("score record: ") + e.what());
  }
  return result;
}

}  // namespace svgauge

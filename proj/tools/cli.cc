#include "cli.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "svgauge/backend.h"
#include "svgauge/cache_backend.h"
#include "svgauge/caching_backend.h"
#include "svgauge/correlation.h"
#include "svgauge/dataset.h"
#include "svgauge/error.h"
#include "svgauge/feature_transform.h"
#include "svgauge/harness.h"
#include "svgauge/metric.h"
#include "svgauge/pooling.h"
#include "svgauge/raster_image.h"
#include "svgauge/rasterizer.h"
#include "svgauge/svg_document.h"
#include "svgauge/tfidf.h"

namespace svgauge::cli {
namespace {

using ojson = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  // shared
  bool pretty = false;
  bool raw = false;
  int jobs = 1;
  std::string backend;
  std::string dataset;
  std::string split;
  std::string output;
  // metric
  std::optional<double> alpha;
  std::optional<double> beta;
  std::string pooling = "mean";
  double blank_tol = kDefaultBlankTolerance;
  std::string pca;
  std::string tfidf;
  bool reference_free = false;
  std::string scores;
  // fit-pca
  int components = kDefaultComponents;
  bool whiten = true;
  std::string manifest;
  std::string corpus;
  // score (single pair)
  std::string prompt;
  std::string reference;
  std::string generated;
  // rasterize / validate
  std::vector<std::string> files;
  int size = 224;
  // evaluate
  std::string level = "both";
  // warm-cache
  std::string cache;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Prints one JSON document (or its table rendering).
void Emit(std::ostream& out, const Options& o, const ojson& j, const std::string& table) {
  if (o.pretty) {
    out << table;
  } else {
    out << j.dump() << "\n";
  }
}

void WarnUndefined(std::ostream& err, const CorrelationTriple& t, const std::string& what) {
  if (!t.defined()) err << "warning: " << what << " correlation undefined (constant input)\n";
}

std::string BackendSpec(const Options& o) {
  if (!o.backend.empty()) return o.backend;
  if (const char* env = std::getenv("SVGAUGE_BACKEND"); env && *env) return env;
  throw UsageError("no backend: pass --backend or set SVGAUGE_BACKEND");
}

std::vector<EvaluationRecord> LoadRecords(const Options& o, const char* default_split = nullptr) {
  if (o.dataset.empty()) throw UsageError("--dataset is required");
  std::vector<EvaluationRecord> records = LoadDataset(o.dataset);
  std::string split = o.split.empty() && default_split ? default_split : o.split;
  if (split.empty() || split == "all") return records;
  const std::optional<Split> s = ParseSplit(split);
  if (!s) throw UsageError("--split must be train, test or all");
  return FilterSplit(records, s);
}

MetricConfig BuildConfig(const Options& o, bool reference_free, std::ostream& err) {
  MetricConfig cfg;
  cfg.alpha = o.alpha.value_or(reference_free ? 0.0 : kDefaultAlpha);
  cfg.beta = o.beta.value_or(reference_free ? 1.0 : kDefaultBeta);
  if (reference_free && cfg.alpha != 0.0) {
    err << "warning: reference-free scoring ignores --alpha\n";
    cfg.alpha = 0.0;
  }
  cfg.pooling = PoolingStrategy::Parse(o.pooling);
  cfg.blank_tol = o.blank_tol;
  cfg.jobs = o.jobs;
  cfg.backend = MakeBackend(BackendSpec(o));
  if (o.tfidf.empty()) throw UsageError("--tfidf is required");
  cfg.tfidf = std::make_shared<TfIdfModel>(TfIdfModel::Load(o.tfidf));
  if (!reference_free) {
    if (o.pca.empty()) throw UsageError("--pca is required for reference-based scoring");
    cfg.transform = std::make_shared<FeatureTransform>(FeatureTransform::Load(o.pca));
  }
  if (std::string w = cfg.Validate(reference_free); !w.empty()) err << "warning: " << w << "\n";
  return cfg;
}

// Scores from a file written by `score --dataset`, or computed now.
std::vector<BatchResult> ObtainScores(const Options& o, std::span<const EvaluationRecord> records,
                                      bool reference_free, std::ostream& err) {
  if (o.scores.empty()) {
    return BatchScore(records, BuildConfig(o, reference_free, err), reference_free);
  }
  std::ifstream in(o.scores);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + o.scores);
  std::map<std::string, BatchResult> by_id;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kSchemaViolation,
                  o.scores + ":" + std::to_string(line_no) + ": " + e.what());
    }
    BatchResult r = BatchResultFromJson(j);
    by_id[r.id] = std::move(r);
  }
  // Keep only the selected records, in dataset order.
  std::vector<BatchResult> out;
  for (const auto& rec : records) {
    auto it = by_id.find(rec.id);
    if (it != by_id.end()) out.push_back(it->second);
  }
  return out;
}

void ReportFailures(std::span<const BatchResult> results, std::ostream& err) {
  size_t failed = 0;
  for (const auto& r : results) {
    if (!r.ok()) ++failed;
  }
  if (failed) {
    err << "warning: " << failed << " of " << results.size()
        << " records failed and are excluded from correlations\n";
  }
}

std::vector<EmbeddingVector> PooledEmbeddings(EmbeddingBackend& backend,
                                              const std::vector<std::string>& sources,
                                              const PoolingStrategy& pooling, int jobs) {
  const int res = backend.descriptor().image_input_resolution;
  std::vector<std::optional<EmbeddingVector>> slots(sources.size());
  std::vector<std::exception_ptr> errors(sources.size());
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next++; i < sources.size(); i = next++) {
      try {
        const SvgDocument doc = ParseAndValidate(sources[i]);
        slots[i] = Pool(backend.ImageFeatureGrid(Rasterize(doc, res)), pooling);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int workers =
      std::max(1, std::min({jobs, backend.descriptor().max_in_flight,
                            static_cast<int>(std::max<size_t>(sources.size(), 1))}));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  std::vector<EmbeddingVector> out;
  for (size_t i = 0; i < sources.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

std::vector<std::string> ReadLines(const std::string& path) {
  std::istringstream in(ReadFile(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) lines.push_back(line);
  }
  return lines;
}

// ---------------------------------------------------------------- commands

int CmdValidate(const Options& o, std::ostream& out, std::ostream&) {
  int status = kExitOk;
  for (const std::string& path : o.files) {
    ojson j;
    if (o.files.size() > 1) j["path"] = path;
    try {
      ParseAndValidate(ReadFile(path), path);
      j["valid"] = true;
    } catch (const Error& e) {
      j["valid"] = false;
      j["error"] = std::string(ErrorCodeName(e.code()));
      j["message"] = e.what();
      status = kExitData;
    }
    out << j.dump() << "\n";
  }
  return status;
}

int CmdRasterize(const Options& o, std::ostream& out, std::ostream&) {
  if (o.files.size() != 1) throw UsageError("rasterize takes exactly one SVG file");
  if (o.size < 1 || o.size > 8192) throw UsageError("--size must lie in [1, 8192]");
  const SvgDocument doc = ParseAndValidate(ReadFile(o.files[0]), o.files[0]);
  RasterizeInfo info;
  const RasterImage img = Rasterize(doc, o.size, &info);
  if (!o.output.empty()) WritePng(img, o.output);
  ojson j;
  j["width"] = img.width();
  j["height"] = img.height();
  j["blank"] = IsBlank(img, o.blank_tol);
  j["viewbox_fallback"] = info.viewport_from_geometry;
  j["drawn_elements"] = info.drawn_elements;
  if (!o.output.empty()) j["png"] = o.output;
  out << j.dump() << "\n";
  return kExitOk;
}

int CmdFitPca(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.output.empty()) throw UsageError("fit-pca needs --output");
  std::shared_ptr<EmbeddingBackend> backend = MakeBackend(BackendSpec(o));
  std::vector<std::string> sources;
  if (!o.manifest.empty()) {
    const std::filesystem::path base = std::filesystem::path(o.manifest).parent_path();
    for (const std::string& p : ReadLines(o.manifest)) {
      const std::filesystem::path fp(p);
      sources.push_back(ReadFile((fp.is_absolute() ? fp : base / fp).string()));
    }
  } else {
    for (const auto& rec : LoadRecords(o, "train")) sources.push_back(rec.reference.Load());
  }
  const PoolingStrategy pooling = PoolingStrategy::Parse(o.pooling);
  const std::vector<EmbeddingVector> corpus = PooledEmbeddings(*backend, sources, pooling, o.jobs);
  std::string warning;
  const FeatureTransform t = FitFeatureTransform(corpus, o.components, o.whiten,
                                                 backend->descriptor().name, &warning);
  if (!warning.empty()) err << "warning: " << warning << "\n";
  t.Save(o.output);
  ojson j;
  j["corpus_size"] = corpus.size();
  j["input_dim"] = t.input_dim;
  j["components"] = t.components;
  j["whiten"] = t.whiten;
  j["pooling"] = pooling.ToString();
  j["corpus_fingerprint"] = t.corpus_fingerprint;
  out << j.dump() << "\n";
  return kExitOk;
}

int CmdFitTfidf(const Options& o, std::ostream& out, std::ostream&) {
  if (o.output.empty()) throw UsageError("fit-tfidf needs --output");
  std::vector<std::string> texts;
  if (!o.corpus.empty()) {
    texts = ReadLines(o.corpus);
  } else {
    for (const auto& rec : LoadRecords(o, "train")) texts.push_back(rec.prompt);
  }
  const TfIdfModel model = FitTfIdf(texts);
  model.Save(o.output);
  ojson j;
  j["corpus_size"] = model.corpus_size();
  j["vocabulary_size"] = model.vocabulary_size();
  j["tokenizer_id"] = model.tokenizer_id();
  out << j.dump() << "\n";
  return kExitOk;
}

std::string ReportTable(const ScoreReport& r) {
  char buf[256];
  std::string out;
  if (r.s_image) {
    std::snprintf(buf, sizeof(buf), "S_I      %.6f\n", *r.s_image);
    out += buf;
  } else {
    out += "S_I      -\n";
  }
  std::snprintf(buf, sizeof(buf), "S_T      %.6f\nSVGauge  %.6f\n", r.s_text, r.combined);
  out += buf;
  out += "caption  " + r.caption + "\n";
  std::string flags;
  for (ScoreFlag f : r.flags) flags += (flags.empty() ? "" : ",") + std::string(FlagName(f));
  out += "flags    " + (flags.empty() ? std::string("-") : flags) + "\n";
  return out;
}

int CmdScore(const Options& o, std::ostream& out, std::ostream& err) {
  if (!o.dataset.empty()) {
    const std::vector<EvaluationRecord> records = LoadRecords(o);
    const std::vector<BatchResult> results =
        BatchScore(records, BuildConfig(o, o.reference_free, err), o.reference_free);
    std::ofstream file;
    if (!o.output.empty()) {
      file.open(o.output);
      if (!file) throw Error(ErrorCode::kIoError, "cannot write " + o.output);
    }
    std::ostream& sink = o.output.empty() ? out : file;
    size_t failed = 0;
    for (const auto& r : results) {
      sink << BatchResultToJson(r).dump() << "\n";
      if (!r.ok()) {
        ++failed;
        err << "warning: " << r.id << ": " << r.error_message << "\n";
      }
    }
    if (failed) err << "warning: " << failed << " of " << results.size() << " records failed\n";
    return kExitOk;
  }

  if (o.generated.empty()) throw UsageError("score needs --generated (or --dataset)");
  if (o.prompt.empty()) throw UsageError("score needs --prompt");
  const bool reference_free = o.reference.empty();
  const MetricConfig cfg = BuildConfig(o, reference_free, err);
  const SvgDocument gen = ParseAndValidate(ReadFile(o.generated), o.generated);
  ScoreReport report;
  if (reference_free) {
    report = ScoreReferenceFree(o.prompt, gen, cfg);
  } else {
    const SvgDocument ref = ParseAndValidate(ReadFile(o.reference), o.reference);
    report = ScorePair(o.prompt, ref, gen, cfg);
  }
  ojson j = BatchResultToJson({"", report, std::nullopt, ""});
  j.erase("id");
  Emit(out, o, j, ReportTable(report));
  return kExitOk;
}

int CmdEvaluate(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.level != "instance" && o.level != "system" && o.level != "both") {
    throw UsageError("--level must be instance, system or both");
  }
  const std::vector<EvaluationRecord> records = LoadRecords(o);
  const std::vector<BatchResult> results = ObtainScores(o, records, o.reference_free, err);
  ReportFailures(results, err);
  const std::vector<ScoredRecord> scored = JoinScores(records, results);
  ojson j;
  std::string table;
  if (o.level != "system") {
    const CorrelationTriple t = InstanceLevelEval(scored);
    WarnUndefined(err, t, "instance-level");
    j["instance"] = TripleToJson(t, o.raw);
    table += "Instance level\n" + TripleToTable(t, o.raw);
  }
  if (o.level != "instance") {
    const SystemLevelResult s = SystemLevelEval(scored);
    WarnUndefined(err, s.triple, "system-level");
    j["system"] = SystemLevelToJson(s, o.raw);
    table += std::string(table.empty() ? "" : "\n") + "System level\n" +
             SystemLevelToTable(s, o.raw);
  }
  Emit(out, o, j, table);
  return kExitOk;
}

int CmdGrid(const Options& o, std::ostream& out, std::ostream& err) {
  const std::vector<EvaluationRecord> records = LoadRecords(o);
  const std::vector<BatchResult> results = ObtainScores(o, records, false, err);
  ReportFailures(results, err);
  const std::vector<GridCell> cells = AlphaBetaGrid(JoinScores(records, results));
  for (const auto& c : cells) {
    if (!c.triple.defined()) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "alpha=%.1f beta=%.1f", c.alpha, c.beta);
      WarnUndefined(err, c.triple, buf);
    }
  }
  Emit(out, o, GridToJson(cells, o.raw), GridToTable(cells, o.raw));
  // Fails loudly after printing the grid.
  AggregateScore(cells);
  return kExitOk;
}

int CmdRank(const Options& o, std::ostream& out, std::ostream& err) {
  const std::vector<EvaluationRecord> records = LoadRecords(o);
  const std::vector<BatchResult> results = ObtainScores(o, records, o.reference_free, err);
  ReportFailures(results, err);
  SystemLevelResult s = SystemLevelEval(JoinScores(records, results));
  std::stable_sort(s.rows.begin(), s.rows.end(), [](const SystemRow& a, const SystemRow& b) {
    return a.metric_mean > b.metric_mean;
  });
  WarnUndefined(err, s.triple, "system-level");
  Emit(out, o, SystemLevelToJson(s, o.raw), SystemLevelToTable(s, o.raw));
  return kExitOk;
}

int CmdDatasetStats(const Options& o, std::ostream& out, std::ostream&) {
  const std::vector<EvaluationRecord> records = LoadRecords(o);
  const std::vector<GeneratorStats> stats = DatasetStats(records, o.size, o.blank_tol, o.jobs);
  Emit(out, o, StatsToJson(stats), StatsToTable(stats));
  return kExitOk;
}

int CmdWarmCache(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.cache.empty()) throw UsageError("warm-cache needs --cache");
  const std::vector<EvaluationRecord> records = LoadRecords(o);
  std::shared_ptr<EmbeddingBackend> source = MakeBackend(BackendSpec(o));
  auto writer = std::make_shared<CacheFileWriter>(o.cache, source->descriptor());
  CachingBackend backend(source, writer);
  const int res = backend.descriptor().image_input_resolution;

  std::vector<std::string> failures(records.size());
  std::atomic<size_t> next{0};
  auto note = [](std::string& slot, const std::string& what, const std::exception& e) {
    slot += (slot.empty() ? "" : "; ") + what + ": " + e.what();
  };
  auto work = [&] {
    for (size_t i = next++; i < records.size(); i = next++) {
      const EvaluationRecord& rec = records[i];
      try {
        backend.TextEmbedding(rec.prompt);
      } catch (const Error& e) {
        note(failures[i], "prompt", e);
      }
      try {
        backend.ImageFeatureGrid(Rasterize(ParseAndValidate(rec.reference.Load(), rec.id), res));
      } catch (const Error& e) {
        note(failures[i], "reference", e);
      }
      if (!rec.generated) continue;
      try {
        const RasterImage img = Rasterize(ParseAndValidate(rec.generated->Load(), rec.id), res);
        backend.ImageFeatureGrid(img);
        backend.TextEmbedding(backend.Caption(img));
      } catch (const Error& e) {
        note(failures[i], "generated", e);
      }
    }
  };
  const int workers = std::max(1, std::min(o.jobs, backend.descriptor().max_in_flight));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  ojson j;
  j["cache"] = o.cache;
  j["appended"] = writer->appended();
  ojson fails = ojson::array();
  for (size_t i = 0; i < records.size(); ++i) {
    if (failures[i].empty()) continue;
    err << "warning: " << records[i].id << ": " << failures[i] << "\n";
    fails.push_back({{"id", records[i].id}, {"message", failures[i]}});
  }
  j["failures"] = std::move(fails);
  out << j.dump() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- wiring

void AddBackend(CLI::App* c, Options& o) {
  c->add_option("--backend", o.backend,
                "cache:<path> | http:<host:port> | http://… | stub[:k=v,…] "
                "(default: $SVGAUGE_BACKEND)");
  c->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::Range(1, 256));
}

void AddDataset(CLI::App* c, Options& o, bool required) {
  auto* opt = c->add_option("--dataset", o.dataset, "Line-delimited JSON dataset");
  if (required) opt->required();
  c->add_option("--split", o.split, "train | test | all");
}

void AddMetric(CLI::App* c, Options& o) {
  c->add_option("--alpha", o.alpha, "Visual weight (default 0.6)");
  c->add_option("--beta", o.beta, "Semantic weight (default 0.4)");
  c->add_option("--pooling", o.pooling, "cls | mean | gem:<p>");
  c->add_option("--blank-tol", o.blank_tol, "Blank-render tolerance");
  c->add_option("--pca", o.pca, "Feature transform JSON (from fit-pca)");
  c->add_option("--tfidf", o.tfidf, "TF-IDF model JSON (from fit-tfidf)");
  AddBackend(c, o);
}

void AddReporting(CLI::App* c, Options& o) {
  c->add_flag("--pretty", o.pretty, "Aligned text tables instead of JSON");
  c->add_flag("--raw", o.raw, "Correlations in [-1, 1] instead of percent");
  c->add_option("--scores", o.scores, "Reuse score JSONL from `score --dataset`");
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"SVGauge: reference-based evaluation for text-to-SVG generation", "svgauge"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Help for every command");

  std::map<CLI::App*, int (*)(const Options&, std::ostream&, std::ostream&)> handlers;

  auto* validate = app.add_subcommand("validate", "Check that files are well-formed SVG");
  validate->add_option("files", o.files, "SVG files")->required();
  handlers[validate] = CmdValidate;

  auto* rasterize = app.add_subcommand("rasterize", "Render an SVG on white (PNG output)");
  rasterize->add_option("file", o.files, "SVG file")->required();
  rasterize->add_option("-o,--output", o.output, "PNG path");
  rasterize->add_option("--size", o.size, "Output side length in pixels");
  rasterize->add_option("--blank-tol", o.blank_tol, "Blank-render tolerance");
  handlers[rasterize] = CmdRasterize;

  auto* fit_pca = app.add_subcommand("fit-pca", "Fit the PCA/whitening feature transform");
  AddDataset(fit_pca, o, false);
  AddBackend(fit_pca, o);
  fit_pca->add_option("--manifest", o.manifest, "File listing SVG paths (overrides --dataset)");
  fit_pca->add_option("--pooling", o.pooling, "cls | mean | gem:<p>");
  fit_pca->add_option("--components", o.components, "Eigenvectors kept")
      ->check(CLI::PositiveNumber);
  fit_pca->add_flag("--whiten,!--no-whiten", o.whiten, "Whiten components (default on)");
  fit_pca->add_option("-o,--output", o.output, "Transform JSON path")->required();
  handlers[fit_pca] = CmdFitPca;

  auto* fit_tfidf = app.add_subcommand("fit-tfidf", "Fit the IDF table on prompts");
  AddDataset(fit_tfidf, o, false);
  fit_tfidf->add_option("--corpus", o.corpus, "Text file, one document per line");
  fit_tfidf->add_option("-o,--output", o.output, "Model JSON path")->required();
  handlers[fit_tfidf] = CmdFitTfidf;

  auto* score = app.add_subcommand("score", "Score one pair, or every record of a dataset");
  AddMetric(score, o);
  AddDataset(score, o, false);
  score->add_option("--prompt", o.prompt, "Reference text");
  score->add_option("--reference", o.reference, "Reference SVG (omit for reference-free)");
  score->add_option("--generated", o.generated, "Generated SVG");
  score->add_flag("--reference-free", o.reference_free, "Dataset mode without references");
  score->add_option("-o,--output", o.output, "Score JSONL path (dataset mode)");
  score->add_flag("--pretty", o.pretty, "Text report");
  handlers[score] = CmdScore;

  auto* evaluate = app.add_subcommand("evaluate", "Correlate scores with human ratings");
  AddMetric(evaluate, o);
  AddDataset(evaluate, o, true);
  AddReporting(evaluate, o);
  evaluate->add_flag("--reference-free", o.reference_free, "Score without references");
  evaluate->add_option("--level", o.level, "instance | system | both");
  handlers[evaluate] = CmdEvaluate;

  auto* grid = app.add_subcommand("grid", "Correlations over the 11-point alpha/beta grid");
  AddMetric(grid, o);
  AddDataset(grid, o, true);
  AddReporting(grid, o);
  handlers[grid] = CmdGrid;

  auto* rank = app.add_subcommand("rank", "Rank generators by mean score");
  AddMetric(rank, o);
  AddDataset(rank, o, true);
  AddReporting(rank, o);
  rank->add_flag("--reference-free", o.reference_free, "Score without references");
  handlers[rank] = CmdRank;

  auto* stats = app.add_subcommand("dataset-stats", "Generation statistics per generator");
  AddDataset(stats, o, true);
  stats->add_option("--size", o.size, "Render size for the blank check");
  stats->add_option("--blank-tol", o.blank_tol, "Blank-render tolerance");
  stats->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::Range(1, 256));
  stats->add_flag("--pretty", o.pretty, "Aligned text table");
  handlers[stats] = CmdDatasetStats;

  auto* warm = app.add_subcommand("warm-cache", "Record backend outputs into a cache file");
  AddDataset(warm, o, true);
  AddBackend(warm, o);
  warm->add_option("--cache", o.cache, "Cache JSONL to append to")->required();
  handlers[warm] = CmdWarmCache;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code != 0) err << "\n" << app.help();
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* cmd = app.get_subcommands().front();
  try {
    return handlers.at(cmd)(o, out, err);
  } catch (const UsageError& e) {
    err << "svgauge " << cmd->get_name() << ": " << e.what() << "\n\n" << cmd->help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "svgauge " << cmd->get_name() << ": " << ErrorCodeName(e.code()) << ": " << e.what()
        << "\n";
    if (e.code() == ErrorCode::kConfigError) return kExitUsage;
    return ClassOf(e.code()) == ErrorClass::kBackend ? kExitBackend : kExitData;
  } catch (const std::exception& e) {
    err << "svgauge " << cmd->get_name() << ": " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace svgauge::cli

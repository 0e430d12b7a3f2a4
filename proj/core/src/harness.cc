#include "svgauge/harness.h"

#include <atomic>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "svgauge/error.h"
#include "svgauge/rasterizer.h"
#include "svgauge/svg_document.h"

namespace svgauge {
namespace {

enum class Outcome { kMissing, kMalformed, kRenderFailure, kBlank, kGood };

Outcome Classify(const EvaluationRecord& rec, int resolution, double blank_tol) {
  if (!rec.generated) return Outcome::kMissing;
  std::optional<SvgDocument> doc;
  try {
    doc = ParseAndValidate(rec.generated->Load(), rec.id);
  } catch (const Error&) {
    // Unreadable files count as bad syntax.
    return Outcome::kMalformed;
  }
  try {
    return IsBlank(Rasterize(*doc, resolution), blank_tol) ? Outcome::kBlank : Outcome::kGood;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kRenderFailure) return Outcome::kRenderFailure;
    throw;
  }
}

std::optional<double> Percent(int num, int den) {
  if (den == 0) return std::nullopt;
  return 100.0 * num / den;
}

double Round1(double v) { return std::round(v * 10.0) / 10.0; }

std::string Fixed(std::optional<double> v, int decimals = 1) {
  if (!v) return "-";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, *v);
  return buf;
}

std::string Row(const std::vector<std::string>& cells, const std::vector<size_t>& widths) {
  std::string out;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out += " ";
    const size_t pad = widths[i] > cells[i].size() ? widths[i] - cells[i].size() : 0;
    // First column left-aligned, numbers right-aligned.
    if (i == 0) {
      out += cells[i] + std::string(pad, ' ');
    } else {
      out += std::string(pad, ' ') + cells[i];
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out + "\n";
}

std::string Table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> widths;
  for (const auto& r : rows) {
    widths.resize(std::max(widths.size(), r.size()), 0);
    for (size_t i = 0; i < r.size(); ++i) widths[i] = std::max(widths[i], r[i].size());
  }
  std::string out;
  for (const auto& r : rows) out += Row(r, widths);
  return out;
}

std::optional<double> Scaled(std::optional<double> v, bool raw) {
  if (!v) return v;
  return raw ? *v : *v * 100.0;
}

std::vector<std::string> TripleCells(const CorrelationTriple& t, bool raw) {
  const int d = raw ? 3 : 1;
  return {Fixed(Scaled(t.spearman, raw), d), Fixed(Scaled(t.kendall, raw), d),
          Fixed(Scaled(t.pearson, raw), d)};
}

}  // namespace

std::optional<double> GeneratorStats::PercentGenerated() const {
  return Percent(generated, records);
}
std::optional<double> GeneratorStats::PercentCorrectSyntax() const {
  return Percent(correct_syntax, generated);
}
std::optional<double> GeneratorStats::PercentWhites() const { return Percent(whites, rendered); }

std::vector<GeneratorStats> DatasetStats(std::span<const EvaluationRecord> records,
                                         int resolution, double blank_tol, int jobs) {
  std::vector<Outcome> outcomes(records.size());
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(records.size())));
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next++; i < records.size(); i = next++) {
      outcomes[i] = Classify(records[i], resolution, blank_tol);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::vector<GeneratorStats> rows;
  std::unordered_map<std::string, size_t> index;
  std::vector<double> human_sums;
  for (size_t i = 0; i < records.size(); ++i) {
    const EvaluationRecord& rec = records[i];
    auto [it, inserted] = index.try_emplace(rec.generator, rows.size());
    if (inserted) {
      rows.push_back({});
      rows.back().generator = rec.generator;
      human_sums.push_back(0.0);
    }
    GeneratorStats& s = rows[it->second];
    ++s.records;
    switch (outcomes[i]) {
      case Outcome::kMissing: break;
      case Outcome::kMalformed: ++s.generated; break;
      case Outcome::kRenderFailure: ++s.generated; ++s.correct_syntax; ++s.render_failures; break;
      case Outcome::kBlank: ++s.generated; ++s.correct_syntax; ++s.rendered; ++s.whites; break;
      case Outcome::kGood: ++s.generated; ++s.correct_syntax; ++s.rendered; break;
    }
    if (rec.human_score) {
      ++s.rated;
      human_sums[it->second] += *rec.human_score;
    }
  }
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].rated) rows[i].human_mean = human_sums[i] / rows[i].rated;
  }
  return rows;
}

std::vector<ScoredRecord> JoinScores(std::span<const EvaluationRecord> records,
                                     std::span<const BatchResult> results) {
  std::unordered_map<std::string, const EvaluationRecord*> by_id;
  for (const auto& r : records) by_id.emplace(r.id, &r);
  std::vector<ScoredRecord> out;
  for (const BatchResult& res : results) {
    auto it = by_id.find(res.id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kSchemaViolation, "score for unknown record id " + res.id);
    }
    if (!res.report) continue;
    const EvaluationRecord& rec = *it->second;
    out.push_back({rec.id, rec.generator, rec.human_score, res.report->s_image,
                   res.report->s_text, res.report->combined});
  }
  return out;
}

namespace {

template <typename ScoreFn>
CorrelationTriple InstanceLevel(std::span<const ScoredRecord> scored, ScoreFn score) {
  std::vector<double> metric, human;
  for (const auto& r : scored) {
    if (!r.human_score) continue;
    metric.push_back(score(r));
    human.push_back(*r.human_score);
  }
  if (metric.empty()) throw Error(ErrorCode::kNoRatedRecords, "no rated records with scores");
  return Correlations(metric, human);
}

}  // namespace

CorrelationTriple InstanceLevelEval(std::span<const ScoredRecord> scored) {
  return InstanceLevel(scored, [](const ScoredRecord& r) { return r.combined; });
}

SystemLevelResult SystemLevelEval(std::span<const ScoredRecord> scored) {
  SystemLevelResult result;
  std::unordered_map<std::string, size_t> index;
  for (const auto& r : scored) {
    if (!r.human_score) continue;
    auto [it, inserted] = index.try_emplace(r.generator, result.rows.size());
    if (inserted) result.rows.push_back({r.generator});
    SystemRow& row = result.rows[it->second];
    ++row.n;
    row.metric_mean += r.combined;
    row.human_mean += *r.human_score;
  }
  if (result.rows.size() < 2) {
    throw Error(ErrorCode::kTooFewGenerators,
                "system-level evaluation needs at least 2 generators with rated records, got " +
                    std::to_string(result.rows.size()));
  }
  std::vector<double> metric, human;
  for (SystemRow& row : result.rows) {
    row.metric_mean /= row.n;
    row.human_mean /= row.n;
    metric.push_back(row.metric_mean);
    human.push_back(row.human_mean);
  }
  result.triple = Correlations(metric, human);
  return result;
}

std::vector<GridCell> AlphaBetaGrid(std::span<const ScoredRecord> scored) {
  for (const auto& r : scored) {
    if (!r.s_image) {
      throw Error(ErrorCode::kConfigError,
                  "record " + r.id + " has no visual score; the grid needs reference-based scores");
    }
  }
  std::vector<GridCell> cells;
  for (int i = 0; i < kGridSteps; ++i) {
    const double alpha = (kGridSteps - 1 - i) / 10.0;
    const double beta = i / 10.0;
    cells.push_back({alpha, beta, InstanceLevel(scored, [&](const ScoredRecord& r) {
                       return r.Reweighted(alpha, beta);
                     })});
  }
  return cells;
}

double AggregateScore(std::span<const GridCell> cells) {
  double sum = 0.0;
  for (const GridCell& c : cells) {
    if (!c.triple.defined()) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "undefined correlation at alpha=%.1f beta=%.1f", c.alpha,
                    c.beta);
      throw Error(ErrorCode::kUndefinedCorrelation, buf);
    }
    sum += *c.triple.spearman + *c.triple.kendall + *c.triple.pearson;
  }
  return sum / (kGridCoefficients * static_cast<double>(cells.size()));
}

nlohmann::ordered_json StatsToJson(std::span<const GeneratorStats> stats) {
  auto pct = [](std::optional<double> v) {
    return v ? nlohmann::ordered_json(Round1(*v)) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& s : stats) {
    nlohmann::ordered_json j;
    j["generator"] = s.generator;
    j["n"] = s.records;
    j["generated"] = pct(s.PercentGenerated());
    j["correct_syntax"] = pct(s.PercentCorrectSyntax());
    j["whites"] = pct(s.PercentWhites());
    j["human_score"] = s.human_mean ? nlohmann::ordered_json(std::round(*s.human_mean * 100) / 100)
                                    : nlohmann::ordered_json(nullptr);
    j["render_failures"] = s.render_failures;
    rows.push_back(std::move(j));
  }
  return rows;
}

nlohmann::ordered_json SystemLevelToJson(const SystemLevelResult& result, bool raw) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : result.rows) {
    nlohmann::ordered_json row;
    row["generator"] = r.generator;
    row["n"] = r.n;
    row["svgauge"] = r.metric_mean;
    row["human_score"] = r.human_mean;
    rows.push_back(std::move(row));
  }
  j["generators"] = std::move(rows);
  j["correlation"] = TripleToJson(result.triple, raw);
  return j;
}

nlohmann::ordered_json GridToJson(std::span<const GridCell> cells, bool raw) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : cells) {
    nlohmann::ordered_json cell;
    cell["alpha"] = c.alpha;
    cell["beta"] = c.beta;
    const nlohmann::ordered_json triple = TripleToJson(c.triple, raw);
    for (const auto& [k, v] : triple.items()) cell[k] = v;
    arr.push_back(std::move(cell));
  }
  j["cells"] = std::move(arr);
  try {
    const double agg = AggregateScore(cells);
    j["aggregate"] = raw ? agg : agg * 100.0;
  } catch (const Error&) {
    j["aggregate"] = nullptr;
  }
  return j;
}

std::string StatsToTable(std::span<const GeneratorStats> stats) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Generator", "%Generated", "%CorrectSyntax", "%Whites", "HumanScore"});
  for (const auto& s : stats) {
    rows.push_back({s.generator, Fixed(s.PercentGenerated()), Fixed(s.PercentCorrectSyntax()),
                    Fixed(s.PercentWhites()), Fixed(s.human_mean, 2)});
  }
  return Table(rows);
}

std::string TripleToTable(const CorrelationTriple& t, bool raw) {
  std::vector<std::string> values = TripleCells(t, raw);
  return Table({{"Spearman", "Kendall", "Pearson"}, values});
}

std::string SystemLevelToTable(const SystemLevelResult& result, bool raw) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Generator", "N", "SVGauge", "HumanScore"});
  for (const auto& r : result.rows) {
    rows.push_back({r.generator, std::to_string(r.n), Fixed(r.metric_mean, 4),
                    Fixed(r.human_mean, 2)});
  }
  std::string out = Table(rows) + "\n";
  return out + TripleToTable(result.triple, raw);
}

std::string GridToTable(std::span<const GridCell> cells, bool raw) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"alpha", "beta", "Spearman", "Kendall", "Pearson"});
  for (const auto& c : cells) {
    std::vector<std::string> row = {Fixed(c.alpha), Fixed(c.beta)};
    for (auto& v : TripleCells(c.triple, raw)) row.push_back(v);
    rows.push_back(std::move(row));
  }
  std::string out = Table(rows);
  try {
    const double agg = AggregateScore(cells);
    out += "\nAggregate " + Fixed(raw ? agg : agg * 100.0, raw ? 3 : 1) + "\n";
  } catch (const Error&) {
    out += "\nAggregate undefined\n";
  }
  return out;
}

}  // namespace svgauge

#include "svgauge/dataset.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "svgauge/error.h"

namespace svgauge {
namespace {

using nlohmann::json;

SvgSource ParseSvgField(const json& v, const std::string& field, const std::string& where,
                        const std::string& base_dir) {
  if (v.is_string()) return SvgSource::Inline(v.get<std::string>());
  if (v.is_object() && v.contains("path") && v["path"].is_string()) {
    std::filesystem::path p = v["path"].get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    return SvgSource::File(p.string());
  }
  throw Error(ErrorCode::kSchemaViolation,
              where + ": \"" + field + "\" must be inline markup or {\"path\": …}");
}

std::string RequireString(const json& rec, const char* field, const std::string& where) {
  if (!rec.contains(field) || !rec[field].is_string()) {
    throw Error(ErrorCode::kSchemaViolation,
                where + ": field \"" + field + "\" must be a string");
  }
  return rec[field].get<std::string>();
}

}  // namespace

std::string_view SplitName(Split s) { return s == Split::kTrain ? "train" : "test"; }

std::optional<Split> ParseSplit(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "test") return Split::kTest;
  return std::nullopt;
}

std::string SvgSource::Load() const {
  if (markup) return *markup;
  if (!path) throw Error(ErrorCode::kIoError, "SVG source has neither markup nor path");
  std::ifstream in(*path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + *path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<EvaluationRecord> ParseDataset(std::string_view text, const std::string& base_dir,
                                           const std::string& source_name) {
  std::vector<EvaluationRecord> records;
  std::set<std::string> ids;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source_name + ":" + std::to_string(lineno);
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
      throw Error(ErrorCode::kSchemaViolation, where + ": not a JSON object");
    }
    EvaluationRecord r;
    r.id = RequireString(rec, "id", where);
    if (r.id.empty()) throw Error(ErrorCode::kSchemaViolation, where + ": empty id");
    r.prompt = RequireString(rec, "prompt", where);
    r.generator = RequireString(rec, "generator", where);
    if (!rec.contains("reference_svg")) {
      throw Error(ErrorCode::kSchemaViolation, where + ": missing \"reference_svg\"");
    }
    r.reference = ParseSvgField(rec["reference_svg"], "reference_svg", where, base_dir);
    if (rec.contains("generated_svg") && !rec["generated_svg"].is_null()) {
      r.generated = ParseSvgField(rec["generated_svg"], "generated_svg", where, base_dir);
    }
    if (rec.contains("human_score") && !rec["human_score"].is_null()) {
      if (!rec["human_score"].is_number()) {
        throw Error(ErrorCode::kSchemaViolation, where + ": human_score must be a number");
      }
      const double score = rec["human_score"].get<double>();
      if (!(score >= 1.0 && score <= 5.0)) {
        throw Error(ErrorCode::kSchemaViolation,
                    where + ": human_score " + rec["human_score"].dump() + " outside [1, 5]");
      }
      r.human_score = score;
    }
    const auto split = ParseSplit(RequireString(rec, "split", where));
    if (!split) {
      throw Error(ErrorCode::kSchemaViolation, where + ": split must be \"train\" or \"test\"");
    }
    r.split = *split;
    if (!ids.insert(r.id).second) {
      throw Error(ErrorCode::kDuplicateId, where + ": duplicate id \"" + r.id + "\"");
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<EvaluationRecord> LoadDataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open dataset " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string base = std::filesystem::path(path).parent_path().string();
  return ParseDataset(buf.str(), base, path);
}

std::vector<EvaluationRecord> FilterSplit(const std::vector<EvaluationRecord>& records,
                                          std::optional<Split> split) {
  if (!split) return records;
  std::vector<EvaluationRecord> out;
  for (const auto& r : records) {
    if (r.split == *split) out.push_back(r);
  }
  return out;
}

}  // namespace svgauge

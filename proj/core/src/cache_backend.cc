#include "svgauge/cache_backend.h"

#include <filesystem>
#include <sstream>

#include "svgauge/error.h"

namespace svgauge {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<double> RealArray(const json& v, const std::string& where) {
  if (!v.is_array()) throw Error(ErrorCode::kSchemaViolation, where + ": expected array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) throw Error(ErrorCode::kSchemaViolation, where + ": non-numeric entry");
    out.push_back(x.get<double>());
  }
  return out;
}

int PositiveInt(const json& rec, const char* field, const std::string& where) {
  if (!rec.contains(field) || !rec[field].is_number_integer() || rec[field].get<long long>() < 1) {
    throw Error(ErrorCode::kSchemaViolation,
                where + ": field \"" + field + "\" must be a positive integer");
  }
  return rec[field].get<int>();
}

std::string StringField(const json& rec, const char* field, const std::string& where) {
  if (!rec.contains(field) || !rec[field].is_string()) {
    throw Error(ErrorCode::kSchemaViolation,
                where + ": field \"" + field + "\" must be a string");
  }
  return rec[field].get<std::string>();
}

BackendDescriptor ParseInfo(const json& rec, const std::string& where) {
  BackendDescriptor d;
  d.name = StringField(rec, "name", where);
  d.image_input_resolution = PositiveInt(rec, "image_input_resolution", where);
  d.image_dim = PositiveInt(rec, "image_dim", where);
  d.text_dim = PositiveInt(rec, "text_dim", where);
  d.max_in_flight = 64;
  return d;
}

}  // namespace

ordered_json CacheInfoRecord(const BackendDescriptor& d) {
  ordered_json j;
  j["kind"] = "info";
  j["name"] = d.name;
  j["image_input_resolution"] = d.image_input_resolution;
  j["image_dim"] = d.image_dim;
  j["text_dim"] = d.text_dim;
  return j;
}

ordered_json CacheGridRecord(const std::string& key, const FeatureGrid& grid) {
  ordered_json j;
  j["key"] = key;
  j["kind"] = "image_grid";
  j["h"] = grid.h;
  j["w"] = grid.w;
  j["dim"] = grid.dim;
  j["cls"] = grid.cls ? ordered_json(*grid.cls) : ordered_json(nullptr);
  j["data"] = grid.data;
  return j;
}

ordered_json CacheTextRecord(const std::string& key, const EmbeddingVector& v) {
  ordered_json j;
  j["key"] = key;
  j["kind"] = "text";
  j["dim"] = v.dim();
  j["data"] = v.values;
  return j;
}

ordered_json CacheCaptionRecord(const std::string& key, const std::string& caption) {
  ordered_json j;
  j["key"] = key;
  j["kind"] = "caption";
  j["text"] = caption;
  return j;
}

FileCacheBackend::FileCacheBackend(const std::string& path) : path_(path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open cache file " + path);
  bool have_info = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kSchemaViolation, where + ": " + e.what());
    }
    if (!rec.is_object()) throw Error(ErrorCode::kSchemaViolation, where + ": not an object");
    const std::string kind = StringField(rec, "kind", where);
    if (kind == "info") {
      BackendDescriptor d = ParseInfo(rec, where);
      if (have_info && d.name != descriptor_.name) {
        throw Error(ErrorCode::kConfigError, where + ": conflicting info record");
      }
      descriptor_ = d;
      have_info = true;
      continue;
    }
    const std::string key = StringField(rec, "key", where);
    if (kind == "image_grid") {
      FeatureGrid grid;
      grid.h = PositiveInt(rec, "h", where);
      grid.w = PositiveInt(rec, "w", where);
      grid.dim = PositiveInt(rec, "dim", where);
      grid.data = RealArray(rec.value("data", json()), where + " data");
      if (rec.contains("cls") && !rec["cls"].is_null()) {
        grid.cls = RealArray(rec["cls"], where + " cls");
      }
      try {
        grid.Validate();
      } catch (const Error& e) {
        throw Error(ErrorCode::kSchemaViolation, where + ": " + e.what());
      }
      grids_.emplace(key, std::move(grid));
    } else if (kind == "text") {
      EmbeddingVector v;
      v.kind = EmbeddingKind::kText;
      v.values = RealArray(rec.value("data", json()), where + " data");
      if (PositiveInt(rec, "dim", where) != v.dim()) {
        throw Error(ErrorCode::kSchemaViolation, where + ": dim does not match data length");
      }
      texts_.emplace(key, std::move(v));
    } else if (kind == "caption") {
      captions_.emplace(key, StringField(rec, "text", where));
    } else {
      throw Error(ErrorCode::kSchemaViolation, where + ": unknown kind \"" + kind + "\"");
    }
  }
  if (!have_info) {
    throw Error(ErrorCode::kConfigError, "cache file " + path + " has no info record");
  }
  descriptor_.Validate();
}

FeatureGrid FileCacheBackend::DoImageFeatureGrid(const RasterImage& img) {
  const std::string key = ImageContentKey(img, descriptor_.name);
  auto it = grids_.find(key);
  if (it == grids_.end()) {
    throw Error(ErrorCode::kBackendUnavailable, "cache miss for image grid " + key);
  }
  return it->second;
}

EmbeddingVector FileCacheBackend::DoTextEmbedding(std::string_view text) {
  const std::string key = TextContentKey(text, descriptor_.name);
  auto it = texts_.find(key);
  if (it == texts_.end()) {
    throw Error(ErrorCode::kBackendUnavailable, "cache miss for text " + key);
  }
  return it->second;
}

std::string FileCacheBackend::DoCaption(const RasterImage& img) {
  const std::string key = ImageContentKey(img, descriptor_.name);
  auto it = captions_.find(key);
  if (it == captions_.end()) {
    throw Error(ErrorCode::kBackendUnavailable, "cache miss for caption " + key);
  }
  return it->second;
}

CacheFileWriter::CacheFileWriter(const std::string& path, const BackendDescriptor& descriptor) {
  const bool exists = std::filesystem::exists(path) && std::filesystem::file_size(path) > 0;
  if (exists) {
    // Validates the existing file and collects the keys already present.
    std::ifstream in(path);
    std::string line;
    bool name_ok = false;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      json rec = json::parse(line, nullptr, false);
      if (rec.is_discarded() || !rec.is_object()) {
        throw Error(ErrorCode::kSchemaViolation, "unparseable line in " + path);
      }
      const std::string kind = rec.value("kind", "");
      if (kind == "info") {
        name_ok = rec.value("name", "") == descriptor.name;
      } else {
        seen_.emplace(kind, rec.value("key", ""));
      }
    }
    if (!name_ok) {
      throw Error(ErrorCode::kConfigError,
                  "cache file " + path + " was written by a different backend");
    }
  }
  out_.open(path, std::ios::app);
  if (!out_) throw Error(ErrorCode::kIoError, "cannot open " + path + " for appending");
  if (!exists) {
    out_ << CacheInfoRecord(descriptor).dump() << '\n';
    out_.flush();
  }
}

void CacheFileWriter::Append(const ordered_json& record) {
  std::lock_guard<std::mutex> lock(mu_);
  auto id = std::make_pair(record.value("kind", ""), record.value("key", ""));
  if (!seen_.insert(id).second) return;
  out_ << record.dump() << '\n';
  out_.flush();
  if (!out_) throw Error(ErrorCode::kIoError, "cache write failed");
  ++appended_;
}

}  // namespace svgauge

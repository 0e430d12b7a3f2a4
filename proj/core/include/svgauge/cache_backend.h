#ifndef SVGAUGE_CACHE_BACKEND_H_
#define SVGAUGE_CACHE_BACKEND_H_

#include <fstream>
#include <mutex>
#include <set>
#include <string>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "svgauge/backend.h"

namespace svgauge {

// Line-delimited JSON embedding cache. One record per line:
//   {"kind":"info","name":…,"image_input_resolution":…,"image_dim":…,"text_dim":…}
//   {"key":…,"kind":"image_grid","h":…,"w":…,"dim":…,"cls":[…]|null,"data":[…]}
//   {"key":…,"kind":"text","dim":…,"data":[…]}
//   {"key":…,"kind":"caption","text":…}
// The info record identifies the backend whose outputs were cached.
nlohmann::ordered_json CacheInfoRecord(const BackendDescriptor& d);
nlohmann::ordered_json CacheGridRecord(const std::string& key, const FeatureGrid& grid);
nlohmann::ordered_json CacheTextRecord(const std::string& key, const EmbeddingVector& v);
nlohmann::ordered_json CacheCaptionRecord(const std::string& key, const std::string& caption);

// Read-only backend over a cache file. A lookup miss is kBackendUnavailable.
class FileCacheBackend : public EmbeddingBackend {
 public:
  // Errors: kIoError, kSchemaViolation (with line number), kConfigError
  // (missing or conflicting info record).
  explicit FileCacheBackend(const std::string& path);

  const BackendDescriptor& descriptor() const override { return descriptor_; }

  size_t grid_count() const { return grids_.size(); }
  size_t text_count() const { return texts_.size(); }
  size_t caption_count() const { return captions_.size(); }

  bool HasGrid(const std::string& key) const { return grids_.count(key) > 0; }
  bool HasText(const std::string& key) const { return texts_.count(key) > 0; }
  bool HasCaption(const std::string& key) const { return captions_.count(key) > 0; }

 protected:
  FeatureGrid DoImageFeatureGrid(const RasterImage& img) override;
  EmbeddingVector DoTextEmbedding(std::string_view text) override;
  std::string DoCaption(const RasterImage& img) override;

 private:
  std::string path_;
  BackendDescriptor descriptor_;
  std::unordered_map<std::string, FeatureGrid> grids_;
  std::unordered_map<std::string, EmbeddingVector> texts_;
  std::unordered_map<std::string, std::string> captions_;
};

// Append-only writer for cache files. Creates the file with an info record
// when absent; refuses to append to a cache written by another backend.
class CacheFileWriter {
 public:
  CacheFileWriter(const std::string& path, const BackendDescriptor& descriptor);

  // Thread-safe. Records whose (kind, key) were already written are skipped.
  void Append(const nlohmann::ordered_json& record);
  size_t appended() const { return appended_; }

 private:
  std::mutex mu_;
  std::ofstream out_;
  std::set<std::pair<std::string, std::string>> seen_;
  size_t appended_ = 0;
};

}  // namespace svgauge

#endif  // SVGAUGE_CACHE_BACKEND_H_

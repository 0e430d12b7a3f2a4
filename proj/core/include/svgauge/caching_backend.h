#ifndef SVGAUGE_CACHING_BACKEND_H_
#define SVGAUGE_CACHING_BACKEND_H_

#include <atomic>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "svgauge/backend.h"
#include "svgauge/cache_backend.h"

namespace svgauge {

// Memoizes an inner backend by content key. For a given key the inner
// backend is queried at most once, even under concurrent callers; failures
// are memoized as well. When a writer is attached, successful results are
// appended to it.
class CachingBackend : public EmbeddingBackend {
 public:
  explicit CachingBackend(std::shared_ptr<EmbeddingBackend> inner,
                          std::shared_ptr<CacheFileWriter> writer = nullptr);

  const BackendDescriptor& descriptor() const override { return inner_->descriptor(); }
  const EmbeddingBackend& inner() const { return *inner_; }

  // Number of queries forwarded to the inner backend.
  size_t inner_queries() const { return inner_queries_.load(); }

 protected:
  FeatureGrid DoImageFeatureGrid(const RasterImage& img) override;
  EmbeddingVector DoTextEmbedding(std::string_view text) override;
  std::string DoCaption(const RasterImage& img) override;

 private:
  template <typename T, typename Fn>
  T Memo(std::map<std::string, std::shared_future<T>>& table, const std::string& key, Fn&& fn);

  std::shared_ptr<EmbeddingBackend> inner_;
  std::shared_ptr<CacheFileWriter> writer_;
  std::mutex mu_;
  std::map<std::string, std::shared_future<FeatureGrid>> grids_;
  std::map<std::string, std::shared_future<EmbeddingVector>> texts_;
  std::map<std::string, std::shared_future<std::string>> captions_;
  std::atomic<size_t> inner_queries_{0};
};

}  // namespace svgauge

#endif  // SVGAUGE_CACHING_BACKEND_H_

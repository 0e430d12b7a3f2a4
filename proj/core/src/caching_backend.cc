#include "svgauge/caching_backend.h"

namespace svgauge {

CachingBackend::CachingBackend(std::shared_ptr<EmbeddingBackend> inner,
                               std::shared_ptr<CacheFileWriter> writer)
    : inner_(std::move(inner)), writer_(std::move(writer)) {}

template <typename T, typename Fn>
T CachingBackend::Memo(std::map<std::string, std::shared_future<T>>& table,
                       const std::string& key, Fn&& fn) {
  std::promise<T> promise;
  std::shared_future<T> future;
  bool owner = false;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = table.find(key);
    if (it != table.end()) {
      future = it->second;
    } else {
      future = promise.get_future().share();
      table.emplace(key, future);
      owner = true;
    }
  }
  if (owner) {
    ++inner_queries_;
    try {
      promise.set_value(fn());
    } catch (...) {
      promise.set_exception(std::current_exception());
    }
  }
  return future.get();
}

FeatureGrid CachingBackend::DoImageFeatureGrid(const RasterImage& img) {
  const std::string key = ImageContentKey(img, descriptor().name);
  return Memo(grids_, key, [&] {
    FeatureGrid grid = inner_->ImageFeatureGrid(img);
    if (writer_) writer_->Append(CacheGridRecord(key, grid));
    return grid;
  });
}

EmbeddingVector CachingBackend::DoTextEmbedding(std::string_view text) {
  const std::string key = TextContentKey(text, descriptor().name);
  return Memo(texts_, key, [&] {
    EmbeddingVector v = inner_->TextEmbedding(text);
    if (writer_) writer_->Append(CacheTextRecord(key, v));
    return v;
  });
}

std::string CachingBackend::DoCaption(const RasterImage& img) {
  const std::string key = ImageContentKey(img, descriptor().name);
  return Memo(captions_, key, [&] {
    std::string caption = inner_->Caption(img);
    if (writer_) writer_->Append(CacheCaptionRecord(key, caption));
    return caption;
  });
}

}  // namespace svgauge

#include <charconv>
#include <memory>
#include <string>

#include "svgauge/backend.h"
#include "svgauge/cache_backend.h"
#include "svgauge/caching_backend.h"
#include "svgauge/error.h"
#include "svgauge/http_backend.h"
#include "svgauge/stub_backend.h"

namespace svgauge {
namespace {

template <typename T>
T ParseNumber(std::string_view text, std::string_view option) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kConfigError,
                "stub option " + std::string(option) + " has invalid value \"" +
                    std::string(text) + "\"");
  }
  return value;
}

// "res=32,grid=4,dim=16,text_dim=32,seed=7,cls=1,name=foo"
StubBackendOptions ParseStubOptions(std::string_view text) {
  StubBackendOptions options;
  while (!text.empty()) {
    const size_t comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) continue;
    const size_t eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfigError, "stub option \"" + std::string(item) + "\" lacks '='");
    }
    const std::string_view key = item.substr(0, eq);
    const std::string_view value = item.substr(eq + 1);
    if (key == "name") {
      options.name = std::string(value);
    } else if (key == "res") {
      options.resolution = ParseNumber<int>(value, key);
    } else if (key == "grid") {
      options.grid = ParseNumber<int>(value, key);
    } else if (key == "dim") {
      options.image_dim = ParseNumber<int>(value, key);
    } else if (key == "text_dim") {
      options.text_dim = ParseNumber<int>(value, key);
    } else if (key == "seed") {
      options.seed = ParseNumber<std::uint64_t>(value, key);
    } else if (key == "cls") {
      options.has_cls = ParseNumber<int>(value, key) != 0;
    } else if (key == "jobs") {
      options.max_in_flight = ParseNumber<int>(value, key);
    } else {
      throw Error(ErrorCode::kConfigError, "unknown stub option \"" + std::string(key) + "\"");
    }
  }
  return options;
}

}  // namespace

std::shared_ptr<EmbeddingBackend> MakeBackend(std::string_view spec) {
  std::shared_ptr<EmbeddingBackend> inner;
  if (spec.rfind("cache:", 0) == 0) {
    inner = std::make_shared<FileCacheBackend>(std::string(spec.substr(6)));
  } else if (spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0) {
    inner = std::make_shared<HttpBackend>(std::string(spec));
  } else if (spec.rfind("http:", 0) == 0) {
    inner = std::make_shared<HttpBackend>("http://" + std::string(spec.substr(5)));
  } else if (spec == "stub") {
    inner = std::make_shared<StubBackend>();
  } else if (spec.rfind("stub:", 0) == 0) {
    inner = std::make_shared<StubBackend>(ParseStubOptions(spec.substr(5)));
  } else {
    throw Error(ErrorCode::kConfigError,
                "unknown backend \"" + std::string(spec) +
                    "\" (expected cache:<path>, http:<url> or stub[:options])");
  }
  return std::make_shared<CachingBackend>(std::move(inner));
}

}  // namespace svgauge

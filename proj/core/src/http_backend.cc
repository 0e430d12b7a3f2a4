#include "svgauge/http_backend.h"

#include <httplib.h>
#include <openssl/evp.h>

#include <nlohmann/json.hpp>

#include "svgauge/error.h"

namespace svgauge {
namespace {

using nlohmann::json;

json ParseBody(const std::string& body, const std::string& endpoint) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kBackendUnavailable, endpoint + " returned invalid JSON");
  }
  return j;
}

std::vector<double> Reals(const json& j, const char* field, const std::string& endpoint) {
  if (!j.contains(field) || !j[field].is_array()) {
    throw Error(ErrorCode::kDimensionMismatch, endpoint + ": missing array \"" + field + "\"");
  }
  std::vector<double> out;
  out.reserve(j[field].size());
  for (const auto& v : j[field]) {
    if (!v.is_number()) {
      throw Error(ErrorCode::kDimensionMismatch, endpoint + ": non-numeric \"" + field + "\"");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

int IntField(const json& j, const char* field, const std::string& endpoint) {
  if (!j.contains(field) || !j[field].is_number_integer()) {
    throw Error(ErrorCode::kDimensionMismatch, endpoint + ": missing integer \"" + field + "\"");
  }
  return j[field].get<int>();
}

}  // namespace

std::string Base64Encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<size_t>(n));
  return out;
}

HttpBackend::HttpBackend(std::string base_url, int timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  httplib::Client client(base_url_);
  client.set_connection_timeout(timeout_seconds_);
  client.set_read_timeout(timeout_seconds_);
  auto res = client.Get("/v1/info");
  if (!res) {
    throw Error(ErrorCode::kBackendUnavailable,
                "cannot reach " + base_url_ + "/v1/info: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kBackendUnavailable,
                "/v1/info returned HTTP " + std::to_string(res->status));
  }
  const json info = ParseBody(res->body, "/v1/info");
  try {
    descriptor_.name = info.at("name").get<std::string>();
    descriptor_.image_input_resolution = IntField(info, "image_input_resolution", "/v1/info");
    descriptor_.image_dim = IntField(info, "image_dim", "/v1/info");
    descriptor_.text_dim = IntField(info, "text_dim", "/v1/info");
    grid_h_ = IntField(info, "grid_h", "/v1/info");
    grid_w_ = IntField(info, "grid_w", "/v1/info");
    has_cls_ = info.at("has_cls").get<bool>();
    descriptor_.max_in_flight = info.value("max_in_flight", 4);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBackendUnavailable, std::string("/v1/info: ") + e.what());
  }
  descriptor_.Validate();
}

std::string HttpBackend::Post(const std::string& endpoint, const std::string& body) const {
  httplib::Client client(base_url_);
  client.set_connection_timeout(timeout_seconds_);
  client.set_read_timeout(timeout_seconds_);
  auto res = client.Post(endpoint, body, "application/json");
  if (!res) {
    throw Error(ErrorCode::kBackendUnavailable,
                endpoint + ": " + httplib::to_string(res.error()));
  }
  if (res->status == 422) {
    throw Error(ErrorCode::kDimensionMismatch, endpoint + " rejected input shape (HTTP 422)");
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kBackendUnavailable,
                endpoint + " returned HTTP " + std::to_string(res->status));
  }
  return res->body;
}

FeatureGrid HttpBackend::DoImageFeatureGrid(const RasterImage& img) {
  const json request = {{"image_png_base64", Base64Encode(EncodePng(img))}};
  const json j = ParseBody(Post("/v1/image_features", request.dump()), "/v1/image_features");
  FeatureGrid grid;
  grid.h = IntField(j, "h", "/v1/image_features");
  grid.w = IntField(j, "w", "/v1/image_features");
  grid.dim = IntField(j, "dim", "/v1/image_features");
  grid.data = Reals(j, "data", "/v1/image_features");
  if (j.contains("cls") && !j["cls"].is_null()) grid.cls = Reals(j, "cls", "/v1/image_features");
  if (grid.h != grid_h_ || grid.w != grid_w_ || grid.cls.has_value() != has_cls_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "/v1/image_features response disagrees with /v1/info declaration");
  }
  return grid;
}

EmbeddingVector HttpBackend::DoTextEmbedding(std::string_view text) {
  const json request = {{"text", std::string(text)}};
  const json j = ParseBody(Post("/v1/text_embedding", request.dump()), "/v1/text_embedding");
  EmbeddingVector v;
  v.kind = EmbeddingKind::kText;
  v.values = Reals(j, "data", "/v1/text_embedding");
  if (IntField(j, "dim", "/v1/text_embedding") != v.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "/v1/text_embedding dim disagrees with data");
  }
  return v;
}

std::string HttpBackend::DoCaption(const RasterImage& img) {
  const json request = {{"image_png_base64", Base64Encode(EncodePng(img))}};
  const json j = ParseBody(Post("/v1/caption", request.dump()), "/v1/caption");
  if (!j.contains("caption") || !j["caption"].is_string()) {
    throw Error(ErrorCode::kBackendUnavailable, "/v1/caption response lacks \"caption\"");
  }
  return j["caption"].get<std::string>();
}

}  // namespace svgauge

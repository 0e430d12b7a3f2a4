#include "svgauge/tfidf.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "svgauge/error.h"
#include "svgauge/feature_transform.h"

namespace svgauge {
namespace {

bool IsTokenByte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c >= 0x80;
}

}  // namespace

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (IsTokenByte(c)) {
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                             : static_cast<char>(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

int TfIdfModel::IndexOf(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? -1 : it->second;
}

TfIdfModel FitTfIdf(std::span<const std::string> texts) {
  if (texts.empty()) throw Error(ErrorCode::kEmptyCorpus, "TF-IDF corpus is empty");
  std::map<std::string, int> df;
  for (const auto& text : texts) {
    const auto tokens = Tokenize(text);
    for (const auto& t : std::set<std::string>(tokens.begin(), tokens.end())) ++df[t];
  }
  if (df.empty()) {
    throw Error(ErrorCode::kAllEmptyTexts, "no token survives tokenization");
  }
  TfIdfModel m;
  m.corpus_size_ = static_cast<int>(texts.size());
  const double n = static_cast<double>(texts.size());
  for (const auto& [term, count] : df) {  // std::map iterates lexicographically
    m.index_.emplace(term, static_cast<int>(m.terms_.size()));
    m.terms_.push_back(term);
    m.idf_.push_back(std::log((1.0 + n) / (1.0 + count)) + 1.0);
  }
  return m;
}

SparseVector TfIdfVectorize(const TfIdfModel& model, std::string_view text) {
  std::map<int, int> counts;
  for (const auto& token : Tokenize(text)) {
    const int idx = model.IndexOf(token);
    if (idx >= 0) ++counts[idx];
  }
  SparseVector v;
  v.dim = model.vocabulary_size();
  double norm2 = 0.0;
  for (const auto& [idx, tf] : counts) {
    const double w = tf * model.Idf(idx);
    v.indices.push_back(idx);
    v.values.push_back(w);
    norm2 += w * w;
  }
  const double norm = std::sqrt(norm2);
  for (double& w : v.values) w /= norm;
  return v;
}

double SparseCosine(const SparseVector& a, const SparseVector& b) {
  if (a.empty() || b.empty()) return 0.0;
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (double x : a.values) na += x * x;
  for (double x : b.values) nb += x * x;
  size_t i = 0;
  size_t j = 0;
  while (i < a.indices.size() && j < b.indices.size()) {
    if (a.indices[i] == b.indices[j]) {
      dot += a.values[i++] * b.values[j++];
    } else if (a.indices[i] < b.indices[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

double TfIdfFactor(const SparseVector& a, const SparseVector& b) {
  return 0.8 + 0.2 * SparseCosine(a, b);
}

double SemanticSimilarity(const EmbeddingVector& e_ref, const EmbeddingVector& e_gen,
                          const SparseVector& v_ref, const SparseVector& v_gen) {
  return CosineSimilarity(e_ref.values, e_gen.values) * TfIdfFactor(v_ref, v_gen);
}

nlohmann::ordered_json TfIdfModel::ToJson() const {
  nlohmann::ordered_json j;
  j["tokenizer_id"] = tokenizer_id_;
  j["corpus_size"] = corpus_size_;
  nlohmann::ordered_json terms = nlohmann::ordered_json::array();
  for (size_t i = 0; i < terms_.size(); ++i) {
    nlohmann::ordered_json t;
    t["token"] = terms_[i];
    t["idf"] = idf_[i];
    terms.push_back(std::move(t));
  }
  j["terms"] = std::move(terms);
  return j;
}

TfIdfModel TfIdfModel::FromJson(const nlohmann::json& j) {
  TfIdfModel m;
  try {
    m.tokenizer_id_ = j.at("tokenizer_id").get<std::string>();
    m.corpus_size_ = j.at("corpus_size").get<int>();
    for (const auto& t : j.at("terms")) {
      m.index_.emplace(t.at("token").get<std::string>(), static_cast<int>(m.terms_.size()));
      m.terms_.push_back(t.at("token").get<std::string>());
      m.idf_.push_back(t.at("idf").get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidModel, std::string("TF-IDF file: ") + e.what());
  }
  if (m.tokenizer_id_ != kTokenizerId) {
    throw Error(ErrorCode::kInvalidModel, "unsupported tokenizer " + m.tokenizer_id_);
  }
  if (m.corpus_size_ < 1) throw Error(ErrorCode::kInvalidModel, "corpus_size must be positive");
  if (m.index_.size() != m.terms_.size()) {
    throw Error(ErrorCode::kInvalidModel, "duplicate terms in TF-IDF file");
  }
  if (!std::is_sorted(m.terms_.begin(), m.terms_.end())) {
    throw Error(ErrorCode::kInvalidModel, "TF-IDF terms are not lexicographically sorted");
  }
  for (double idf : m.idf_) {
    if (!(idf > 0) || !std::isfinite(idf)) {
      throw Error(ErrorCode::kInvalidModel, "idf values must be positive");
    }
  }
  return m;
}

void TfIdfModel::Save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out << ToJson().dump(1) << '\n';
}

TfIdfModel TfIdfModel::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kInvalidModel, path + " is not valid JSON");
  return FromJson(j);
}

}  // namespace svgauge

#ifndef SVGAUGE_TFIDF_H_
#define SVGAUGE_TFIDF_H_

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "svgauge/embedding.h"

namespace svgauge {

inline constexpr char kTokenizerId[] = "lower-alnum-v1";

// Lowercases ASCII letters and splits on every run of ASCII characters that
// are not letters or digits. Bytes >= 0x80 are kept inside tokens, so UTF-8
// words survive intact.
std::vector<std::string> Tokenize(std::string_view text);

struct SparseVector {
  std::vector<int> indices;  // strictly increasing
  std::vector<double> values;
  int dim = 0;

  bool empty() const { return indices.empty(); }
};

class TfIdfModel {
 public:
  TfIdfModel() = default;

  int vocabulary_size() const { return static_cast<int>(terms_.size()); }
  int corpus_size() const { return corpus_size_; }
  const std::string& tokenizer_id() const { return tokenizer_id_; }
  // -1 when out of vocabulary.
  int IndexOf(const std::string& token) const;
  double Idf(int index) const { return idf_[index]; }
  const std::string& Term(int index) const { return terms_[index]; }

  nlohmann::ordered_json ToJson() const;
  static TfIdfModel FromJson(const nlohmann::json& j);
  void Save(const std::string& path) const;
  static TfIdfModel Load(const std::string& path);

 private:
  friend TfIdfModel FitTfIdf(std::span<const std::string> texts);

  std::vector<std::string> terms_;  // lexicographic
  std::map<std::string, int, std::less<>> index_;
  std::vector<double> idf_;
  int corpus_size_ = 0;
  std::string tokenizer_id_ = kTokenizerId;
};

// idf(t) = ln((1 + N) / (1 + df(t))) + 1.
// Errors: kEmptyCorpus, kAllEmptyTexts.
TfIdfModel FitTfIdf(std::span<const std::string> texts);

// Raw in-document counts times idf, L2-normalized; out-of-vocabulary tokens
// are dropped and an empty vector is a valid result.
SparseVector TfIdfVectorize(const TfIdfModel& model, std::string_view text);

// Cosine of two nonnegative sparse vectors, in [0, 1]; 0 when either is empty.
double SparseCosine(const SparseVector& a, const SparseVector& b);

// 0.8 + 0.2 * SparseCosine(a, b), always within [0.8, 1].
double TfIdfFactor(const SparseVector& a, const SparseVector& b);

// S_T = cos(e_ref, e_gen) * (0.8 + 0.2 * cos(v_ref, v_gen)).
// Errors: kZeroVector for a dense embedding with norm < 1e-12.
double SemanticSimilarity(const EmbeddingVector& e_ref, const EmbeddingVector& e_gen,
                          const SparseVector& v_ref, const SparseVector& v_gen);

}  // namespace svgauge

#endif  // SVGAUGE_TFIDF_H_

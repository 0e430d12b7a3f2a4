#ifndef SVGAUGE_SRC_SVG_STYLE_H_
#define SVGAUGE_SRC_SVG_STYLE_H_

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "geometry.h"

namespace svgauge::internal {

struct Rgba {
  double r = 0.0, g = 0.0, b = 0.0, a = 1.0;
};

std::optional<Rgba> ParseColor(std::string_view text);

struct Paint {
  enum class Kind { kNone, kColor, kCurrentColor, kUrl };
  Kind kind = Kind::kNone;
  Rgba color;
  std::string url_id;
  std::optional<Rgba> fallback;  // `url(#id) <color>`
};

std::optional<Paint> ParsePaint(std::string_view text);

// Number scanner shared by the transform, points and path grammars.
class NumberScanner {
 public:
  explicit NumberScanner(std::string_view text) : text_(text) {}

  void SkipWhitespace();
  // Skips whitespace and at most one comma.
  void SkipSeparator();
  std::optional<double> Number();
  // Single '0'/'1' arc flag, which may be glued to the next token.
  std::optional<bool> Flag();
  bool AtEnd();
  char Peek();
  void Advance() { ++pos_; }
  size_t position() const { return pos_; }

 private:
  std::string_view text_;
  size_t pos_ = 0;
};

std::vector<double> ParseNumberList(std::string_view text);

// Returns nullopt when the attribute is syntactically invalid.
std::optional<Affine> ParseTransform(std::string_view text);

// "a: b; c: d" -> {{"a","b"},{"c","d"}}; names lowercased.
std::vector<std::pair<std::string, std::string>> ParseDeclarations(
    std::string_view text);

// Simple selectors only: `*`, `tag`, `.class`, `#id`, `tag.class`, and
// comma lists thereof. Rules with any other selector form are dropped.
struct CssRule {
  std::string tag;  // empty = any
  std::vector<std::string> classes;
  std::string id;
  int specificity = 0;
  int order = 0;
  std::vector<std::pair<std::string, std::string>> declarations;
};

std::vector<CssRule> ParseStylesheet(std::string_view css);

std::string_view Trim(std::string_view s);

}  // namespace svgauge::internal

#endif  // SVGAUGE_SRC_SVG_STYLE_H_

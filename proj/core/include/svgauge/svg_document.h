#ifndef SVGAUGE_SVG_DOCUMENT_H_
#define SVGAUGE_SVG_DOCUMENT_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace svgauge {

// Minimal element tree produced from well-formed markup. Element and
// attribute names are stored by local name (any `prefix:` is stripped).
struct XmlElement {
  std::string name;
  std::map<std::string, std::string> attributes;
  std::vector<XmlElement> children;
  std::string text;  // concatenated character data directly inside

  const std::string* Attribute(std::string_view key) const;
};

// A syntactically valid SVG document. Holds the raw source together with the
// parsed element tree, so rasterization never re-parses.
class SvgDocument {
 public:
  SvgDocument(std::string id, std::string source,
              std::shared_ptr<const XmlElement> root);

  const std::string& id() const { return id_; }
  const std::string& source() const { return source_; }
  const XmlElement& root() const { return *root_; }

  // Root width/height in CSS px when given as absolute lengths.
  std::optional<double> width_hint() const { return width_hint_; }
  std::optional<double> height_hint() const { return height_hint_; }

 private:
  std::string id_;
  std::string source_;
  std::shared_ptr<const XmlElement> root_;
  std::optional<double> width_hint_;
  std::optional<double> height_hint_;
};

// Accepts `source` iff it is well-formed XML 1.0 whose root local name is
// `svg`. Throws Error{kMalformedMarkup} or Error{kWrongRoot}.
SvgDocument ParseAndValidate(std::string_view source, std::string id = {});

// Parses an SVG length ("12", "3.5px", "2in", ...) into px. Percentages and
// unparseable input yield nullopt.
std::optional<double> ParseAbsoluteLength(std::string_view text);

}  // namespace svgauge

#endif  // SVGAUGE_SVG_DOCUMENT_H_

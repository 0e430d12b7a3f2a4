#include "svgauge/svg_document.h"

#include <expat.h>

#include <charconv>
#include <cctype>
#include <cmath>
#include <limits>
#include <utility>

#include "svgauge/error.h"

namespace svgauge {
namespace {

std::string LocalName(const char* qualified) {
  std::string_view name(qualified);
  const auto colon = name.rfind(':');
  if (colon != std::string_view::npos) name.remove_prefix(colon + 1);
  return std::string(name);
}

struct TreeBuilder {
  XmlElement root;
  std::vector<XmlElement*> stack;
  bool have_root = false;

  static void OnStart(void* user, const char* name, const char** attrs) {
    auto* self = static_cast<TreeBuilder*>(user);
    XmlElement* element;
    if (self->stack.empty()) {
      element = &self->root;
      self->have_root = true;
    } else {
      element = &self->stack.back()->children.emplace_back();
    }
    element->name = LocalName(name);
    for (int i = 0; attrs[i] != nullptr; i += 2) {
      // First occurrence wins when two prefixed attributes share a local name.
      element->attributes.emplace(LocalName(attrs[i]), attrs[i + 1]);
    }
    self->stack.push_back(element);
  }

  static void OnEnd(void* user, const char*) {
    static_cast<TreeBuilder*>(user)->stack.pop_back();
  }

  static void OnText(void* user, const char* s, int len) {
    auto* self = static_cast<TreeBuilder*>(user);
    if (!self->stack.empty()) self->stack.back()->text.append(s, len);
  }
};

struct ParserDeleter {
  void operator()(XML_Parser p) const { XML_ParserFree(p); }
};

}  // namespace

const std::string* XmlElement::Attribute(std::string_view key) const {
  auto it = attributes.find(std::string(key));
  return it == attributes.end() ? nullptr : &it->second;
}

std::optional<double> ParseAbsoluteLength(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || !std::isfinite(value)) return std::nullopt;
  const std::string_view unit(ptr, text.data() + text.size() - ptr);
  double scale;
  if (unit.empty() || unit == "px") {
    scale = 1.0;
  } else if (unit == "pt") {
    scale = 96.0 / 72.0;
  } else if (unit == "pc") {
    scale = 16.0;
  } else if (unit == "in") {
    scale = 96.0;
  } else if (unit == "cm") {
    scale = 96.0 / 2.54;
  } else if (unit == "mm") {
    scale = 96.0 / 25.4;
  } else if (unit == "em") {
    scale = 16.0;
  } else if (unit == "ex") {
    scale = 8.0;
  } else {
    return std::nullopt;
  }
  return value * scale;
}

SvgDocument::SvgDocument(std::string id, std::string source,
                         std::shared_ptr<const XmlElement> root)
    : id_(std::move(id)), source_(std::move(source)), root_(std::move(root)) {
  auto positive = [](const std::string* attr) -> std::optional<double> {
    if (attr == nullptr) return std::nullopt;
    auto v = ParseAbsoluteLength(*attr);
    if (v && *v > 0.0) return v;
    return std::nullopt;
  };
  width_hint_ = positive(root_->Attribute("width"));
  height_hint_ = positive(root_->Attribute("height"));
}

SvgDocument ParseAndValidate(std::string_view source, std::string id) {
  if (source.size() > static_cast<size_t>(std::numeric_limits<int>::max())) {
    throw Error(ErrorCode::kMalformedMarkup, "document too large");
  }
  std::unique_ptr<XML_ParserStruct, ParserDeleter> parser(
      XML_ParserCreate("UTF-8"));
  if (!parser) throw Error(ErrorCode::kMalformedMarkup, "out of memory");

  TreeBuilder builder;
  XML_SetUserData(parser.get(), &builder);
  XML_SetElementHandler(parser.get(), &TreeBuilder::OnStart, &TreeBuilder::OnEnd);
  XML_SetCharacterDataHandler(parser.get(), &TreeBuilder::OnText);

  if (XML_Parse(parser.get(), source.data(), static_cast<int>(source.size()),
                XML_TRUE) != XML_STATUS_OK) {
    const XML_Error code = XML_GetErrorCode(parser.get());
    throw Error(ErrorCode::kMalformedMarkup,
                std::string(XML_ErrorString(code)) + " at line " +
                    std::to_string(XML_GetCurrentLineNumber(parser.get())) +
                    ", column " +
                    std::to_string(XML_GetCurrentColumnNumber(parser.get()) + 1));
  }
  if (!builder.have_root) {
    throw Error(ErrorCode::kMalformedMarkup, "no root element");
  }
  if (builder.root.name != "svg") {
    throw Error(ErrorCode::kWrongRoot,
                "root element is <" + builder.root.name + ">, expected <svg>");
  }
  return SvgDocument(std::move(id), std::string(source),
                     std::make_shared<const XmlElement>(std::move(builder.root)));
}

}  // namespace svgauge

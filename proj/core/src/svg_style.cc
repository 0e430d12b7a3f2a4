#include "svg_style.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace svgauge::internal {
namespace {

struct NamedColor {
  std::string_view name;
  std::uint32_t rgb;
};

// CSS Color Module Level 3 extended keywords, sorted by name.
constexpr NamedColor kNamedColors[] = {
    {"aliceblue", 0xF0F8FF},       {"antiquewhite", 0xFAEBD7},
    {"aqua", 0x00FFFF},            {"aquamarine", 0x7FFFD4},
    {"azure", 0xF0FFFF},           {"beige", 0xF5F5DC},
    {"bisque", 0xFFE4C4},          {"black", 0x000000},
    {"blanchedalmond", 0xFFEBCD},  {"blue", 0x0000FF},
    {"blueviolet", 0x8A2BE2},      {"brown", 0xA52A2A},
    {"burlywood", 0xDEB887},       {"cadetblue", 0x5F9EA0},
    {"chartreuse", 0x7FFF00},      {"chocolate", 0xD2691E},
    {"coral", 0xFF7F50},           {"cornflowerblue", 0x6495ED},
    {"cornsilk", 0xFFF8DC},        {"crimson", 0xDC143C},
    {"cyan", 0x00FFFF},            {"darkblue", 0x00008B},
    {"darkcyan", 0x008B8B},        {"darkgoldenrod", 0xB8860B},
    {"darkgray", 0xA9A9A9},        {"darkgreen", 0x006400},
    {"darkgrey", 0xA9A9A9},        {"darkkhaki", 0xBDB76B},
    {"darkmagenta", 0x8B008B},     {"darkolivegreen", 0x556B2F},
    {"darkorange", 0xFF8C00},      {"darkorchid", 0x9932CC},
    {"darkred", 0x8B0000},         {"darksalmon", 0xE9967A},
    {"darkseagreen", 0x8FBC8F},    {"darkslateblue", 0x483D8B},
    {"darkslategray", 0x2F4F4F},   {"darkslategrey", 0x2F4F4F},
    {"darkturquoise", 0x00CED1},   {"darkviolet", 0x9400D3},
    {"deeppink", 0xFF1493},        {"deepskyblue", 0x00BFFF},
    {"dimgray", 0x696969},         {"dimgrey", 0x696969},
    {"dodgerblue", 0x1E90FF},      {"firebrick", 0xB22222},
    {"floralwhite", 0xFFFAF0},     {"forestgreen", 0x228B22},
    {"fuchsia", 0xFF00FF},         {"gainsboro", 0xDCDCDC},
    {"ghostwhite", 0xF8F8FF},      {"gold", 0xFFD700},
    {"goldenrod", 0xDAA520},       {"gray", 0x808080},
    {"green", 0x008000},           {"greenyellow", 0xADFF2F},
    {"grey", 0x808080},            {"honeydew", 0xF0FFF0},
    {"hotpink", 0xFF69B4},         {"indianred", 0xCD5C5C},
    {"indigo", 0x4B0082},          {"ivory", 0xFFFFF0},
    {"khaki", 0xF0E68C},           {"lavender", 0xE6E6FA},
    {"lavenderblush", 0xFFF0F5},   {"lawngreen", 0x7CFC00},
    {"lemonchiffon", 0xFFFACD},    {"lightblue", 0xADD8E6},
    {"lightcoral", 0xF08080},      {"lightcyan", 0xE0FFFF},
    {"lightgoldenrodyellow", 0xFAFAD2}, {"lightgray", 0xD3D3D3},
    {"lightgreen", 0x90EE90},      {"lightgrey", 0xD3D3D3},
    {"lightpink", 0xFFB6C1},       {"lightsalmon", 0xFFA07A},
    {"lightseagreen", 0x20B2AA},   {"lightskyblue", 0x87CEFA},
    {"lightslategray", 0x778899},  {"lightslategrey", 0x778899},
    {"lightsteelblue", 0xB0C4DE},  {"lightyellow", 0xFFFFE0},
    {"lime", 0x00FF00},            {"limegreen", 0x32CD32},
    {"linen", 0xFAF0E6},           {"magenta", 0xFF00FF},
    {"maroon", 0x800000},          {"mediumaquamarine", 0x66CDAA},
    {"mediumblue", 0x0000CD},      {"mediumorchid", 0xBA55D3},
    {"mediumpurple", 0x9370DB},    {"mediumseagreen", 0x3CB371},
    {"mediumslateblue", 0x7B68EE}, {"mediumspringgreen", 0x00FA9A},
    {"mediumturquoise", 0x48D1CC}, {"mediumvioletred", 0xC71585},
    {"midnightblue", 0x191970},    {"mintcream", 0xF5FFFA},
    {"mistyrose", 0xFFE4E1},       {"moccasin", 0xFFE4B5},
    {"navajowhite", 0xFFDEAD},     {"navy", 0x000080},
    {"oldlace", 0xFDF5E6},         {"olive", 0x808000},
    {"olivedrab", 0x6B8E23},       {"orange", 0xFFA500},
    {"orangered", 0xFF4500},       {"orchid", 0xDA70D6},
    {"palegoldenrod", 0xEEE8AA},   {"palegreen", 0x98FB98},
    {"paleturquoise", 0xAFEEEE},   {"palevioletred", 0xDB7093},
    {"papayawhip", 0xFFEFD5},      {"peachpuff", 0xFFDAB9},
    {"peru", 0xCD853F},            {"pink", 0xFFC0CB},
    {"plum", 0xDDA0DD},            {"powderblue", 0xB0E0E6},
    {"purple", 0x800080},          {"rebeccapurple", 0x663399},
    {"red", 0xFF0000},             {"rosybrown", 0xBC8F8F},
    {"royalblue", 0x4169E1},       {"saddlebrown", 0x8B4513},
    {"salmon", 0xFA8072},          {"sandybrown", 0xF4A460},
    {"seagreen", 0x2E8B57},        {"seashell", 0xFFF5EE},
    {"sienna", 0xA0522D},          {"silver", 0xC0C0C0},
    {"skyblue", 0x87CEEB},         {"slateblue", 0x6A5ACD},
    {"slategray", 0x708090},       {"slategrey", 0x708090},
    {"snow", 0xFFFAFA},            {"springgreen", 0x00FF7F},
    {"steelblue", 0x4682B4},       {"tan", 0xD2B48C},
    {"teal", 0x008080},            {"thistle", 0xD8BFD8},
    {"tomato", 0xFF6347},          {"turquoise", 0x40E0D0},
    {"violet", 0xEE82EE},          {"wheat", 0xF5DEB3},
    {"white", 0xFFFFFF},           {"whitesmoke", 0xF5F5F5},
    {"yellow", 0xFFFF00},          {"yellowgreen", 0x9ACD32},
};

std::string Lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

int HexDigit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

Rgba FromRgb24(std::uint32_t rgb) {
  return {((rgb >> 16) & 0xFF) / 255.0, ((rgb >> 8) & 0xFF) / 255.0,
          (rgb & 0xFF) / 255.0, 1.0};
}

std::optional<Rgba> ParseHex(std::string_view hex) {
  std::vector<int> d;
  for (char c : hex) {
    const int v = HexDigit(c);
    if (v < 0) return std::nullopt;
    d.push_back(v);
  }
  switch (d.size()) {
    case 3:
    case 4: {
      Rgba c{d[0] * 17 / 255.0, d[1] * 17 / 255.0, d[2] * 17 / 255.0, 1.0};
      if (d.size() == 4) c.a = d[3] * 17 / 255.0;
      return c;
    }
    case 6:
    case 8: {
      Rgba c{(d[0] * 16 + d[1]) / 255.0, (d[2] * 16 + d[3]) / 255.0,
             (d[4] * 16 + d[5]) / 255.0, 1.0};
      if (d.size() == 8) c.a = (d[6] * 16 + d[7]) / 255.0;
      return c;
    }
    default:
      return std::nullopt;
  }
}

// rgb()/rgba()/hsl()/hsla() argument list; each entry keeps its % marker.
std::optional<std::vector<std::pair<double, bool>>> FunctionArgs(
    std::string_view body) {
  std::vector<std::pair<double, bool>> args;
  NumberScanner scan(body);
  while (!scan.AtEnd()) {
    auto v = scan.Number();
    if (!v) return std::nullopt;
    bool percent = false;
    if (!scan.AtEnd() && scan.Peek() == '%') {
      percent = true;
      scan.Advance();
    }
    args.emplace_back(*v, percent);
    scan.SkipWhitespace();
    if (!scan.AtEnd() && (scan.Peek() == ',' || scan.Peek() == '/')) {
      scan.Advance();
    }
  }
  return args;
}

double HueToRgb(double p, double q, double t) {
  if (t < 0) t += 1;
  if (t > 1) t -= 1;
  if (t < 1.0 / 6) return p + (q - p) * 6 * t;
  if (t < 1.0 / 2) return q;
  if (t < 2.0 / 3) return p + (q - p) * (2.0 / 3 - t) * 6;
  return p;
}

}  // namespace

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<Rgba> ParseColor(std::string_view text) {
  text = Trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '#') return ParseHex(text.substr(1));

  const std::string lower = Lower(text);
  if (lower == "transparent") return Rgba{0, 0, 0, 0};

  const auto open = lower.find('(');
  if (open != std::string::npos && lower.back() == ')') {
    const std::string fn(Trim(std::string_view(lower).substr(0, open)));
    auto args = FunctionArgs(
        std::string_view(lower).substr(open + 1, lower.size() - open - 2));
    if (!args || args->size() < 3 || args->size() > 4) return std::nullopt;
    auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
    auto alpha = [&]() {
      if (args->size() < 4) return 1.0;
      auto [v, pct] = (*args)[3];
      return clamp01(pct ? v / 100.0 : v);
    };
    if (fn == "rgb" || fn == "rgba") {
      double ch[3];
      for (int i = 0; i < 3; ++i) {
        auto [v, pct] = (*args)[i];
        ch[i] = clamp01(pct ? v / 100.0 : v / 255.0);
      }
      return Rgba{ch[0], ch[1], ch[2], alpha()};
    }
    if (fn == "hsl" || fn == "hsla") {
      const double h = std::fmod(std::fmod((*args)[0].first, 360.0) + 360.0, 360.0) / 360.0;
      const double s = clamp01((*args)[1].first / 100.0);
      const double l = clamp01((*args)[2].first / 100.0);
      if (s == 0.0) return Rgba{l, l, l, alpha()};
      const double q = l < 0.5 ? l * (1 + s) : l + s - l * s;
      const double p = 2 * l - q;
      return Rgba{HueToRgb(p, q, h + 1.0 / 3), HueToRgb(p, q, h),
                  HueToRgb(p, q, h - 1.0 / 3), alpha()};
    }
    return std::nullopt;
  }

  auto it = std::lower_bound(
      std::begin(kNamedColors), std::end(kNamedColors), lower,
      [](const NamedColor& c, const std::string& n) { return c.name < n; });
  if (it != std::end(kNamedColors) && it->name == lower) {
    return FromRgb24(it->rgb);
  }
  return std::nullopt;
}

std::optional<Paint> ParsePaint(std::string_view text) {
  text = Trim(text);
  const std::string lower = Lower(text);
  Paint paint;
  if (lower == "none") {
    paint.kind = Paint::Kind::kNone;
    return paint;
  }
  if (lower == "currentcolor") {
    paint.kind = Paint::Kind::kCurrentColor;
    return paint;
  }
  if (lower.rfind("url(", 0) == 0) {
    const auto close = text.find(')');
    if (close == std::string_view::npos) return std::nullopt;
    std::string_view ref = Trim(text.substr(4, close - 4));
    if (!ref.empty() && (ref.front() == '"' || ref.front() == '\'')) {
      ref = ref.substr(1, ref.size() >= 2 ? ref.size() - 2 : 0);
    }
    if (ref.empty() || ref.front() != '#') return std::nullopt;
    paint.kind = Paint::Kind::kUrl;
    paint.url_id = std::string(ref.substr(1));
    const std::string_view rest = Trim(text.substr(close + 1));
    if (!rest.empty()) {
      if (Lower(rest) == "none") {
        paint.fallback = Rgba{0, 0, 0, 0};
      } else {
        paint.fallback = ParseColor(rest);
      }
    }
    return paint;
  }
  auto color = ParseColor(text);
  if (!color) return std::nullopt;
  paint.kind = Paint::Kind::kColor;
  paint.color = *color;
  return paint;
}

void NumberScanner::SkipWhitespace() {
  while (pos_ < text_.size() &&
         std::isspace(static_cast<unsigned char>(text_[pos_]))) {
    ++pos_;
  }
}

void NumberScanner::SkipSeparator() {
  SkipWhitespace();
  if (pos_ < text_.size() && text_[pos_] == ',') {
    ++pos_;
    SkipWhitespace();
  }
}

bool NumberScanner::AtEnd() {
  SkipWhitespace();
  return pos_ >= text_.size();
}

char NumberScanner::Peek() {
  SkipWhitespace();
  return pos_ < text_.size() ? text_[pos_] : '\0';
}

std::optional<double> NumberScanner::Number() {
  SkipWhitespace();
  // Scan the SVG number grammar by hand: from_chars alone would accept
  // "inf"/"nan" and reject a leading '+' or a bare ".5".
  size_t i = pos_;
  const size_t start = i;
  if (i < text_.size() && (text_[i] == '+' || text_[i] == '-')) ++i;
  const size_t mantissa_start = i;
  bool digits = false;
  while (i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]))) {
    ++i;
    digits = true;
  }
  if (i < text_.size() && text_[i] == '.') {
    ++i;
    while (i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]))) {
      ++i;
      digits = true;
    }
  }
  if (!digits) return std::nullopt;
  if (i < text_.size() && (text_[i] == 'e' || text_[i] == 'E')) {
    size_t j = i + 1;
    if (j < text_.size() && (text_[j] == '+' || text_[j] == '-')) ++j;
    if (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) {
      while (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) ++j;
      i = j;
    }
  }
  std::string buf(text_.substr(mantissa_start, i - mantissa_start));
  if (buf.front() == '.') buf.insert(buf.begin(), '0');
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec == std::errc::result_out_of_range) return std::nullopt;
  if (ec != std::errc() || ptr != buf.data() + buf.size()) return std::nullopt;
  if (text_[start] == '-') value = -value;
  pos_ = i;
  return value;
}

std::optional<bool> NumberScanner::Flag() {
  SkipWhitespace();
  if (pos_ >= text_.size()) return std::nullopt;
  const char c = text_[pos_];
  if (c != '0' && c != '1') return std::nullopt;
  ++pos_;
  return c == '1';
}

std::vector<double> ParseNumberList(std::string_view text) {
  std::vector<double> out;
  NumberScanner scan(text);
  while (!scan.AtEnd()) {
    auto v = scan.Number();
    if (!v) break;
    out.push_back(*v);
    scan.SkipSeparator();
  }
  return out;
}

std::optional<Affine> ParseTransform(std::string_view text) {
  Affine result;
  size_t pos = 0;
  while (true) {
    while (pos < text.size() &&
           (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == ',')) {
      ++pos;
    }
    if (pos >= text.size()) break;
    size_t name_end = pos;
    while (name_end < text.size() && std::isalpha(static_cast<unsigned char>(text[name_end]))) {
      ++name_end;
    }
    const std::string name = Lower(text.substr(pos, name_end - pos));
    const size_t open = text.find('(', name_end);
    const size_t close = text.find(')', name_end);
    if (name.empty() || open == std::string_view::npos ||
        close == std::string_view::npos || close < open ||
        !Trim(text.substr(name_end, open - name_end)).empty()) {
      return std::nullopt;
    }
    const std::vector<double> v = ParseNumberList(text.substr(open + 1, close - open - 1));
    Affine t;
    if (name == "matrix" && v.size() == 6) {
      t = {v[0], v[1], v[2], v[3], v[4], v[5]};
    } else if (name == "translate" && (v.size() == 1 || v.size() == 2)) {
      t = Affine::Translate(v[0], v.size() == 2 ? v[1] : 0.0);
    } else if (name == "scale" && (v.size() == 1 || v.size() == 2)) {
      t = Affine::Scale(v[0], v.size() == 2 ? v[1] : v[0]);
    } else if (name == "rotate" && (v.size() == 1 || v.size() == 3)) {
      const double rad = v[0] * std::numbers::pi / 180.0;
      const Affine r{std::cos(rad), std::sin(rad), -std::sin(rad), std::cos(rad), 0, 0};
      if (v.size() == 3) {
        t = Affine::Translate(v[1], v[2]) * r * Affine::Translate(-v[1], -v[2]);
      } else {
        t = r;
      }
    } else if (name == "skewx" && v.size() == 1) {
      t = {1, 0, std::tan(v[0] * std::numbers::pi / 180.0), 1, 0, 0};
    } else if (name == "skewy" && v.size() == 1) {
      t = {1, std::tan(v[0] * std::numbers::pi / 180.0), 0, 1, 0, 0};
    } else {
      return std::nullopt;
    }
    result = result * t;
    pos = close + 1;
  }
  return result;
}

std::vector<std::pair<std::string, std::string>> ParseDeclarations(
    std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find(';', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view decl = text.substr(pos, end - pos);
    const size_t colon = decl.find(':');
    if (colon != std::string_view::npos) {
      std::string_view value = Trim(decl.substr(colon + 1));
      const auto important = value.find("!important");
      if (important != std::string_view::npos) {
        value = Trim(value.substr(0, important));
      }
      const std::string name = Lower(Trim(decl.substr(0, colon)));
      if (!name.empty()) out.emplace_back(name, std::string(value));
    }
    pos = end + 1;
  }
  return out;
}

namespace {

std::optional<CssRule> ParseSimpleSelector(std::string_view sel) {
  sel = Trim(sel);
  if (sel.empty()) return std::nullopt;
  CssRule rule;
  if (sel == "*") return rule;
  size_t pos = 0;
  auto ident = [&]() {
    const size_t start = pos;
    while (pos < sel.size() &&
           (std::isalnum(static_cast<unsigned char>(sel[pos])) || sel[pos] == '-' ||
            sel[pos] == '_')) {
      ++pos;
    }
    return std::string(sel.substr(start, pos - start));
  };
  rule.tag = ident();
  if (!rule.tag.empty()) rule.specificity += 1;
  while (pos < sel.size()) {
    const char c = sel[pos++];
    const std::string name = ident();
    if (name.empty()) return std::nullopt;
    if (c == '.') {
      rule.classes.push_back(name);
      rule.specificity += 10;
    } else if (c == '#') {
      rule.id = name;
      rule.specificity += 100;
    } else {
      return std::nullopt;  // combinators, attribute selectors, pseudo-classes
    }
  }
  return rule;
}

}  // namespace

std::vector<CssRule> ParseStylesheet(std::string_view css) {
  std::string stripped;
  stripped.reserve(css.size());
  for (size_t i = 0; i < css.size(); ++i) {
    if (css.compare(i, 2, "/*") == 0) {
      const size_t end = css.find("*/", i + 2);
      if (end == std::string_view::npos) break;
      i = end + 1;
      continue;
    }
    stripped.push_back(css[i]);
  }

  std::vector<CssRule> rules;
  int order = 0;
  size_t pos = 0;
  const std::string_view text(stripped);
  while (pos < text.size()) {
    const size_t open = text.find('{', pos);
    if (open == std::string_view::npos) break;
    const size_t close = text.find('}', open);
    if (close == std::string_view::npos) break;
    const std::string_view selectors = Trim(text.substr(pos, open - pos));
    const auto decls = ParseDeclarations(text.substr(open + 1, close - open - 1));
    pos = close + 1;
    if (selectors.empty() || selectors.front() == '@') continue;
    size_t s = 0;
    while (s <= selectors.size()) {
      size_t comma = selectors.find(',', s);
      if (comma == std::string_view::npos) comma = selectors.size();
      if (auto rule = ParseSimpleSelector(selectors.substr(s, comma - s))) {
        rule->declarations = decls;
        rule->order = order++;
        rules.push_back(std::move(*rule));
      }
      s = comma + 1;
    }
  }
  return rules;
}

}  // namespace svgauge::internal

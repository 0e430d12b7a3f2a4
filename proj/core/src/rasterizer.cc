#include "svgauge/rasterizer.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "geometry.h"
#include "svg_path.h"
#include "svg_style.h"
#include "svgauge/error.h"

namespace svgauge {
namespace {

using internal::Affine;
using internal::Paint;
using internal::Path;
using internal::Point;
using internal::Polyline;
using internal::Rgba;

constexpr int kSupersample = 4;  // samples per pixel along each axis
constexpr int kMaxDepth = 256;
constexpr size_t kMaxPoints = 4'000'000;
constexpr double kFlattenTolerancePx = 0.2;

enum class LineJoin { kMiter, kRound, kBevel };
enum class LineCap { kButt, kRound, kSquare };

struct Style {
  Paint fill = [] {
    Paint p;
    p.kind = Paint::Kind::kColor;
    p.color = Rgba{0, 0, 0, 1};
    return p;
  }();
  Paint stroke;  // none
  Rgba current_color{0, 0, 0, 1};
  double fill_opacity = 1.0;
  double stroke_opacity = 1.0;
  double opacity = 1.0;  // product down the ancestor chain
  double stroke_width = 1.0;
  double miter_limit = 4.0;
  bool evenodd = false;
  bool visible = true;
  LineJoin join = LineJoin::kMiter;
  LineCap cap = LineCap::kButt;
};

struct DrawItem {
  Path path;
  Affine to_root;
  std::optional<Rgba> fill;
  std::optional<Rgba> stroke;
  double stroke_width = 0.0;
  double miter_limit = 4.0;
  bool evenodd = false;
  LineJoin join = LineJoin::kMiter;
  LineCap cap = LineCap::kButt;
};

struct Box {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  void Add(Point p, double margin = 0.0) {
    min_x = std::min(min_x, p.x - margin);
    min_y = std::min(min_y, p.y - margin);
    max_x = std::max(max_x, p.x + margin);
    max_y = std::max(max_y, p.y + margin);
  }
  bool empty() const { return !(max_x >= min_x && max_y >= min_y); }
  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
};

bool IsSkippedElement(const std::string& name) {
  static const std::set<std::string> kSkipped = {
      "defs",   "symbol",   "clipPath",       "mask",           "marker",
      "pattern", "linearGradient", "radialGradient", "title", "desc",
      "metadata", "style",  "script",         "text",           "image",
      "foreignObject", "filter", "font", "font-face", "animate",
      "animateTransform", "animateMotion", "set", "view", "cursor"};
  return kSkipped.count(name) > 0;
}

// Collects drawable items from the element tree in paint order.
class SceneBuilder {
 public:
  SceneBuilder(const XmlElement& root, double viewport_w, double viewport_h)
      : viewport_w_(viewport_w), viewport_h_(viewport_h) {
    Index(root);
  }

  std::vector<DrawItem> Build(const XmlElement& root, const Affine& root_transform) {
    Style style;
    ApplyElementStyle(root, style);
    if (!Displayed(root)) return {};
    Affine base = root_transform;
    if (const auto* t = root.Attribute("transform")) {
      if (auto parsed = internal::ParseTransform(*t)) base = base * *parsed;
    }
    for (const auto& child : root.children) Visit(child, style, base, 1);
    return std::move(items_);
  }

 private:
  void Index(const XmlElement& e) {
    if (const auto* id = e.Attribute("id")) ids_.emplace(*id, &e);
    if (e.name == "style") {
      auto parsed = internal::ParseStylesheet(e.text);
      for (auto& rule : parsed) {
        rule.order += static_cast<int>(rules_.size());
        rules_.push_back(std::move(rule));
      }
    }
    for (const auto& c : e.children) Index(c);
  }

  static bool Displayed(const XmlElement& e) {
    if (const auto* d = e.Attribute("display")) {
      if (internal::Trim(*d) == "none") return false;
    }
    if (const auto* s = e.Attribute("style")) {
      for (const auto& [k, v] : internal::ParseDeclarations(*s)) {
        if (k == "display" && internal::Trim(v) == "none") return false;
      }
    }
    return true;
  }

  double Length(const XmlElement& e, const char* attr, double percent_base,
                double fallback = 0.0) const {
    const auto* v = e.Attribute(attr);
    if (v == nullptr) return fallback;
    const std::string_view text = internal::Trim(*v);
    if (!text.empty() && text.back() == '%') {
      internal::NumberScanner scan(text.substr(0, text.size() - 1));
      if (auto n = scan.Number(); n && scan.AtEnd()) return *n / 100.0 * percent_base;
      return fallback;
    }
    return ParseAbsoluteLength(text).value_or(fallback);
  }

  double DiagonalBase() const {
    return std::hypot(viewport_w_, viewport_h_) / std::numbers::sqrt2;
  }

  void ApplyProperty(Style& style, double& own_opacity, const std::string& name,
                     const std::string& raw) const {
    const std::string_view value = internal::Trim(raw);
    if (value == "inherit" || value.empty()) return;
    auto number = [&]() -> std::optional<double> {
      internal::NumberScanner scan(value);
      auto n = scan.Number();
      if (!n) return std::nullopt;
      if (!scan.AtEnd() && scan.Peek() == '%') {
        scan.Advance();
        *n /= 100.0;
      }
      if (!scan.AtEnd()) return std::nullopt;
      return n;
    };
    if (name == "fill") {
      if (auto p = internal::ParsePaint(value)) style.fill = *p;
    } else if (name == "stroke") {
      if (auto p = internal::ParsePaint(value)) style.stroke = *p;
    } else if (name == "color") {
      if (auto c = internal::ParseColor(value)) style.current_color = *c;
    } else if (name == "fill-opacity") {
      if (auto n = number()) style.fill_opacity = std::clamp(*n, 0.0, 1.0);
    } else if (name == "stroke-opacity") {
      if (auto n = number()) style.stroke_opacity = std::clamp(*n, 0.0, 1.0);
    } else if (name == "opacity") {
      if (auto n = number()) own_opacity = std::clamp(*n, 0.0, 1.0);
    } else if (name == "stroke-width") {
      if (!value.empty() && value.back() == '%') {
        if (auto n = number()) style.stroke_width = std::max(0.0, *n * DiagonalBase());
      } else if (auto len = ParseAbsoluteLength(value)) {
        style.stroke_width = std::max(0.0, *len);
      }
    } else if (name == "stroke-miterlimit") {
      if (auto n = number(); n && *n >= 1.0) style.miter_limit = *n;
    } else if (name == "fill-rule") {
      if (value == "evenodd") style.evenodd = true;
      if (value == "nonzero") style.evenodd = false;
    } else if (name == "stroke-linejoin") {
      if (value == "round") style.join = LineJoin::kRound;
      if (value == "bevel") style.join = LineJoin::kBevel;
      if (value == "miter" || value == "miter-clip" || value == "arcs") {
        style.join = LineJoin::kMiter;
      }
    } else if (name == "stroke-linecap") {
      if (value == "round") style.cap = LineCap::kRound;
      if (value == "square") style.cap = LineCap::kSquare;
      if (value == "butt") style.cap = LineCap::kButt;
    } else if (name == "visibility") {
      style.visible = value == "visible";
    }
  }

  bool RuleMatches(const internal::CssRule& rule, const XmlElement& e) const {
    if (!rule.tag.empty() && rule.tag != e.name) return false;
    if (!rule.id.empty()) {
      const auto* id = e.Attribute("id");
      if (id == nullptr || *id != rule.id) return false;
    }
    if (!rule.classes.empty()) {
      const auto* cls = e.Attribute("class");
      if (cls == nullptr) return false;
      std::set<std::string> have;
      size_t pos = 0;
      const std::string& s = *cls;
      while (pos < s.size()) {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        size_t end = pos;
        while (end < s.size() && !std::isspace(static_cast<unsigned char>(s[end]))) ++end;
        if (end > pos) have.insert(s.substr(pos, end - pos));
        pos = end;
      }
      for (const auto& c : rule.classes) {
        if (!have.count(c)) return false;
      }
    }
    return true;
  }

  // Presentation attributes < stylesheet rules < inline style.
  void ApplyElementStyle(const XmlElement& e, Style& style) const {
    static const char* kProperties[] = {
        "fill",           "stroke",           "color",           "fill-opacity",
        "stroke-opacity", "opacity",          "stroke-width",    "stroke-miterlimit",
        "fill-rule",      "stroke-linejoin",  "stroke-linecap",  "visibility"};
    double own_opacity = 1.0;
    for (const char* prop : kProperties) {
      if (const auto* v = e.Attribute(prop)) ApplyProperty(style, own_opacity, prop, *v);
    }
    std::vector<const internal::CssRule*> matched;
    for (const auto& rule : rules_) {
      if (RuleMatches(rule, e)) matched.push_back(&rule);
    }
    std::stable_sort(matched.begin(), matched.end(), [](const auto* a, const auto* b) {
      return a->specificity != b->specificity ? a->specificity < b->specificity
                                              : a->order < b->order;
    });
    for (const auto* rule : matched) {
      for (const auto& [k, v] : rule->declarations) ApplyProperty(style, own_opacity, k, v);
    }
    if (const auto* s = e.Attribute("style")) {
      for (const auto& [k, v] : internal::ParseDeclarations(*s)) {
        ApplyProperty(style, own_opacity, k, v);
      }
    }
    style.opacity *= own_opacity;
  }

  std::optional<Rgba> GradientColor(const XmlElement& gradient) const {
    // Stops may be inherited through href chains; bounded to avoid cycles.
    const XmlElement* g = &gradient;
    for (int hop = 0; hop < 16 && g != nullptr; ++hop) {
      std::vector<Rgba> stops;
      for (const auto& child : g->children) {
        if (child.name != "stop") continue;
        Rgba color{0, 0, 0, 1};
        double stop_opacity = 1.0;
        auto apply = [&](const std::string& k, const std::string& v) {
          if (k == "stop-color") {
            if (auto c = internal::ParseColor(v)) color = *c;
          } else if (k == "stop-opacity") {
            internal::NumberScanner scan(v);
            if (auto n = scan.Number()) stop_opacity = std::clamp(*n, 0.0, 1.0);
          }
        };
        for (const char* k : {"stop-color", "stop-opacity"}) {
          if (const auto* v = child.Attribute(k)) apply(k, *v);
        }
        if (const auto* s = child.Attribute("style")) {
          for (const auto& [k, v] : internal::ParseDeclarations(*s)) apply(k, v);
        }
        color.a *= stop_opacity;
        stops.push_back(color);
      }
      if (!stops.empty()) {
        Rgba avg{0, 0, 0, 0};
        for (const auto& s : stops) {
          avg.r += s.r;
          avg.g += s.g;
          avg.b += s.b;
          avg.a += s.a;
        }
        const double n = static_cast<double>(stops.size());
        return Rgba{avg.r / n, avg.g / n, avg.b / n, avg.a / n};
      }
      const auto* href = g->Attribute("href");
      if (href == nullptr || href->empty() || (*href)[0] != '#') return std::nullopt;
      auto it = ids_.find(href->substr(1));
      g = it == ids_.end() ? nullptr : it->second;
    }
    return std::nullopt;
  }

  std::optional<Rgba> Resolve(const Paint& paint, const Style& style,
                              double paint_opacity) const {
    std::optional<Rgba> color;
    switch (paint.kind) {
      case Paint::Kind::kNone:
        return std::nullopt;
      case Paint::Kind::kColor:
        color = paint.color;
        break;
      case Paint::Kind::kCurrentColor:
        color = style.current_color;
        break;
      case Paint::Kind::kUrl: {
        auto it = ids_.find(paint.url_id);
        if (it != ids_.end() && (it->second->name == "linearGradient" ||
                                 it->second->name == "radialGradient")) {
          color = GradientColor(*it->second);
        }
        if (!color) color = paint.fallback;
        break;
      }
    }
    if (!color) return std::nullopt;
    color->a *= paint_opacity * style.opacity;
    if (color->a <= 0.0) return std::nullopt;
    return color;
  }

  void Emit(Path path, const Style& style, const Affine& m, bool fillable) {
    if (!style.visible || path.empty()) return;
    DrawItem item;
    item.path = std::move(path);
    item.to_root = m;
    if (fillable) item.fill = Resolve(style.fill, style, style.fill_opacity);
    if (style.stroke_width > 0.0) {
      item.stroke = Resolve(style.stroke, style, style.stroke_opacity);
    }
    if (!item.fill && !item.stroke) return;
    item.stroke_width = style.stroke_width;
    item.miter_limit = style.miter_limit;
    item.evenodd = style.evenodd;
    item.join = style.join;
    item.cap = style.cap;
    items_.push_back(std::move(item));
  }

  void VisitChildren(const XmlElement& e, const Style& style, const Affine& m,
                     int depth) {
    for (const auto& child : e.children) Visit(child, style, m, depth + 1);
  }

  void Visit(const XmlElement& e, const Style& parent, const Affine& parent_m,
             int depth) {
    if (depth > kMaxDepth) {
      throw Error(ErrorCode::kRenderFailure, "element nesting exceeds depth limit");
    }
    if (IsSkippedElement(e.name) || !Displayed(e)) return;

    Style style = parent;
    ApplyElementStyle(e, style);
    Affine m = parent_m;
    if (const auto* t = e.Attribute("transform")) {
      if (auto parsed = internal::ParseTransform(*t)) m = m * *parsed;
    }

    const double vw = viewport_w_;
    const double vh = viewport_h_;
    if (e.name == "g" || e.name == "a" || e.name == "switch") {
      VisitChildren(e, style, m, depth);
    } else if (e.name == "svg") {
      m = m * Affine::Translate(Length(e, "x", vw), Length(e, "y", vh));
      const auto vb = e.Attribute("viewBox") ? internal::ParseNumberList(*e.Attribute("viewBox"))
                                             : std::vector<double>{};
      const double w = Length(e, "width", vw, 0.0);
      const double h = Length(e, "height", vh, 0.0);
      if (vb.size() == 4 && vb[2] > 0 && vb[3] > 0 && w > 0 && h > 0) {
        const double s = std::min(w / vb[2], h / vb[3]);
        m = m * Affine::Translate((w - vb[2] * s) / 2, (h - vb[3] * s) / 2) *
            Affine::Scale(s, s) * Affine::Translate(-vb[0], -vb[1]);
      }
      VisitChildren(e, style, m, depth);
    } else if (e.name == "use") {
      VisitUse(e, style, m, depth);
    } else if (e.name == "rect") {
      const double w = Length(e, "width", vw);
      const double h = Length(e, "height", vh);
      if (w <= 0 || h <= 0) return;
      const bool has_rx = e.Attribute("rx") != nullptr;
      const bool has_ry = e.Attribute("ry") != nullptr;
      double rx = Length(e, "rx", vw);
      double ry = Length(e, "ry", vh);
      if (has_rx && !has_ry) ry = rx;
      if (has_ry && !has_rx) rx = ry;
      Emit(internal::RectPath(Length(e, "x", vw), Length(e, "y", vh), w, h, rx, ry), style,
           m, true);
    } else if (e.name == "circle") {
      const double r = Length(e, "r", DiagonalBase());
      if (r <= 0) return;
      Emit(internal::EllipsePath(Length(e, "cx", vw), Length(e, "cy", vh), r, r), style, m,
           true);
    } else if (e.name == "ellipse") {
      double rx = Length(e, "rx", vw, -1.0);
      double ry = Length(e, "ry", vh, -1.0);
      if (rx < 0) rx = ry;
      if (ry < 0) ry = rx;
      if (rx <= 0 || ry <= 0) return;
      Emit(internal::EllipsePath(Length(e, "cx", vw), Length(e, "cy", vh), rx, ry), style, m,
           true);
    } else if (e.name == "line") {
      Path p;
      p.MoveTo({Length(e, "x1", vw), Length(e, "y1", vh)});
      p.LineTo({Length(e, "x2", vw), Length(e, "y2", vh)});
      Emit(std::move(p), style, m, false);
    } else if (e.name == "polyline" || e.name == "polygon") {
      const auto* pts = e.Attribute("points");
      if (pts == nullptr) return;
      const auto v = internal::ParseNumberList(*pts);
      if (v.size() < 4) return;
      Path p;
      p.MoveTo({v[0], v[1]});
      for (size_t i = 2; i + 1 < v.size(); i += 2) p.LineTo({v[i], v[i + 1]});
      if (e.name == "polygon") p.Close();
      Emit(std::move(p), style, m, true);
    } else if (e.name == "path") {
      const auto* d = e.Attribute("d");
      if (d == nullptr) return;
      Emit(internal::ParsePathData(*d), style, m, true);
    }
    // Unknown elements are ignored along with their subtree.
  }

  void VisitUse(const XmlElement& e, const Style& style, Affine m, int depth) {
    const auto* href = e.Attribute("href");
    if (href == nullptr || href->empty() || (*href)[0] != '#') return;
    auto it = ids_.find(href->substr(1));
    if (it == ids_.end()) return;
    const XmlElement* target = it->second;
    if (use_stack_.count(target)) {
      throw Error(ErrorCode::kRenderFailure, "circular <use> reference to #" + href->substr(1));
    }
    use_stack_.insert(target);
    m = m * Affine::Translate(Length(e, "x", viewport_w_), Length(e, "y", viewport_h_));
    if (target->name == "symbol") {
      Style symbol_style = style;
      ApplyElementStyle(*target, symbol_style);
      const auto vb = target->Attribute("viewBox")
                          ? internal::ParseNumberList(*target->Attribute("viewBox"))
                          : std::vector<double>{};
      const double w = Length(e, "width", viewport_w_, 0.0);
      const double h = Length(e, "height", viewport_h_, 0.0);
      if (vb.size() == 4 && vb[2] > 0 && vb[3] > 0 && w > 0 && h > 0) {
        const double s = std::min(w / vb[2], h / vb[3]);
        m = m * Affine::Translate((w - vb[2] * s) / 2, (h - vb[3] * s) / 2) *
            Affine::Scale(s, s) * Affine::Translate(-vb[0], -vb[1]);
      }
      VisitChildren(*target, symbol_style, m, depth);
    } else if (target->name == "svg") {
      VisitChildren(*target, style, m, depth);
    } else {
      // Referenced originals may live in <defs>; render them regardless.
      if (IsSkippedElement(target->name)) {
        if (target->name == "defs" || target->name == "symbol") {
          VisitChildren(*target, style, m, depth);
        }
      } else {
        Visit(*target, style, m, depth + 1);
      }
    }
    use_stack_.erase(target);
  }

  double viewport_w_;
  double viewport_h_;
  std::unordered_map<std::string, const XmlElement*> ids_;
  std::vector<internal::CssRule> rules_;
  std::set<const XmlElement*> use_stack_;
  std::vector<DrawItem> items_;
};

// Supersampled scanline coverage with a device-space clip rectangle.
class CoverageRasterizer {
 public:
  CoverageRasterizer(int size, double clip_x0, double clip_y0, double clip_x1,
                     double clip_y1)
      : size_(size), counts_(static_cast<size_t>(size) * size, 0) {
    const int samples = size * kSupersample;
    clip_g0_ = SampleIndex(clip_x0, samples);
    clip_g1_ = SampleIndex(clip_x1, samples);
    clip_r0_ = SampleIndex(clip_y0, samples);
    clip_r1_ = SampleIndex(clip_y1, samples);
  }

  // Accumulates per-pixel sample counts for the union of `polygons` under the
  // given fill rule, then composites `color` onto `img`.
  void FillAndComposite(const std::vector<std::vector<Point>>& polygons, bool evenodd,
                        const Rgba& color, RasterImage& img) {
    struct Edge {
      double y0, y1, x0, slope;
      int dir;
    };
    std::vector<Edge> edges;
    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -ymin;
    for (const auto& poly : polygons) {
      const size_t n = poly.size();
      if (n < 3) continue;
      for (size_t i = 0; i < n; ++i) {
        Point a = poly[i];
        Point b = poly[(i + 1) % n];
        if (a.y == b.y) continue;
        int dir = 1;
        if (a.y > b.y) {
          std::swap(a, b);
          dir = -1;
        }
        edges.push_back({a.y, b.y, a.x, (b.x - a.x) / (b.y - a.y), dir});
        ymin = std::min(ymin, a.y);
        ymax = std::max(ymax, b.y);
      }
    }
    if (edges.empty()) return;
    std::sort(edges.begin(), edges.end(),
              [](const Edge& l, const Edge& r) { return l.y0 < r.y0; });

    const int samples = size_ * kSupersample;
    const int r0 = std::max(clip_r0_, SampleIndex(ymin, samples));
    const int r1 = std::min(clip_r1_, SampleIndex(ymax, samples));
    if (r0 >= r1) return;

    std::fill(counts_.begin(), counts_.end(), 0);
    int touched_y0 = size_;
    int touched_y1 = -1;

    std::vector<const Edge*> active;
    std::vector<std::pair<double, int>> crossings;
    size_t next = 0;
    for (int r = r0; r < r1; ++r) {
      const double y = (r + 0.5) / kSupersample;
      while (next < edges.size() && edges[next].y0 <= y) active.push_back(&edges[next++]);
      std::erase_if(active, [y](const Edge* e) { return e->y1 <= y; });
      crossings.clear();
      for (const Edge* e : active) {
        if (e->y0 <= y && y < e->y1) {
          crossings.emplace_back(e->x0 + (y - e->y0) * e->slope, e->dir);
        }
      }
      if (crossings.size() < 2) continue;
      std::sort(crossings.begin(), crossings.end());
      const int py = r / kSupersample;
      int winding = 0;
      for (size_t i = 0; i + 1 < crossings.size(); ++i) {
        winding += crossings[i].second;
        const bool inside = evenodd ? (winding & 1) != 0 : winding != 0;
        if (!inside) continue;
        const int g0 = std::max(clip_g0_, SampleIndex(crossings[i].first, samples));
        const int g1 = std::min(clip_g1_, SampleIndex(crossings[i + 1].first, samples));
        if (g0 >= g1) continue;
        std::uint16_t* row = &counts_[static_cast<size_t>(py) * size_];
        for (int g = g0; g < g1; ++g) ++row[g / kSupersample];
        touched_y0 = std::min(touched_y0, py);
        touched_y1 = std::max(touched_y1, py);
      }
    }

    constexpr double kFull = kSupersample * kSupersample;
    for (int py = touched_y0; py <= touched_y1; ++py) {
      for (int px = 0; px < size_; ++px) {
        const std::uint16_t count = counts_[static_cast<size_t>(py) * size_ + px];
        if (count == 0) continue;
        const double a = std::min(1.0, count / kFull) * color.a;
        float* p = img.At(px, py);
        p[0] = static_cast<float>(p[0] * (1.0 - a) + color.r * a);
        p[1] = static_cast<float>(p[1] * (1.0 - a) + color.g * a);
        p[2] = static_cast<float>(p[2] * (1.0 - a) + color.b * a);
      }
    }
  }

 private:
  // Index of the first sample whose center is >= v.
  static int SampleIndex(double v, int samples) {
    const double g = std::ceil(v * kSupersample - 0.5);
    return static_cast<int>(std::clamp(g, 0.0, static_cast<double>(samples)));
  }

  int size_;
  int clip_g0_, clip_g1_, clip_r0_, clip_r1_;
  std::vector<std::uint16_t> counts_;
};

std::vector<Point> CirclePolygon(Point c, double r, int segments) {
  std::vector<Point> out;
  out.reserve(segments);
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * std::numbers::pi * i / segments;
    out.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  return out;
}

// Outline of a stroked polyline as a union of convex pieces (segment quads,
// joins, caps), all in the polyline's coordinate space.
void StrokeOutline(const Polyline& line, const DrawItem& item, int circle_segments,
                   std::vector<std::vector<Point>>& out) {
  const double hw = item.stroke_width / 2.0;
  std::vector<Point> pts;
  for (const Point& p : line.points) {
    if (pts.empty() || !(p == pts.back())) pts.push_back(p);
  }
  bool closed = line.closed;
  if (closed && pts.size() > 1 && pts.front() == pts.back()) pts.pop_back();
  if (pts.size() < 2) closed = false;

  if (pts.size() == 1) {
    if (item.cap == LineCap::kRound) out.push_back(CirclePolygon(pts[0], hw, circle_segments));
    if (item.cap == LineCap::kSquare && (line.closed || line.points.size() > 1)) {
      const Point p = pts[0];
      out.push_back({{p.x - hw, p.y - hw}, {p.x + hw, p.y - hw}, {p.x + hw, p.y + hw},
                     {p.x - hw, p.y + hw}});
    }
    return;
  }

  const size_t n = pts.size();
  const size_t segs = closed ? n : n - 1;
  auto dir_of = [&](size_t i) {
    const Point d = pts[(i + 1) % n] - pts[i];
    return d * (1.0 / Length(d));
  };
  auto normal = [hw](Point d) { return Point{-d.y * hw, d.x * hw}; };

  for (size_t i = 0; i < segs; ++i) {
    const Point a = pts[i];
    const Point b = pts[(i + 1) % n];
    const Point nn = normal(dir_of(i));
    out.push_back({a + nn, b + nn, b - nn, a - nn});
  }

  auto join = [&](size_t vertex, Point d0, Point d1) {
    const Point v = pts[vertex];
    if (item.join == LineJoin::kRound) {
      out.push_back(CirclePolygon(v, hw, circle_segments));
      return;
    }
    const double cross = internal::Cross(d0, d1);
    const double dot = internal::Dot(d0, d1);
    if (std::abs(cross) < 1e-12 && dot > 0) return;
    const double side = cross > 0 ? -1.0 : 1.0;
    const Point n0 = normal(d0) * side;
    const Point n1 = normal(d1) * side;
    if (item.join == LineJoin::kMiter) {
      const double cos_half = std::sqrt(std::max(0.0, (1.0 + dot) / 2.0));
      if (cos_half > 0 && 1.0 / cos_half <= item.miter_limit) {
        const Point bis = n0 + n1;
        const double len = Length(bis);
        if (len > 0) {
          const Point tip = v + bis * (hw / cos_half / len);
          out.push_back({v, v + n0, tip, v + n1});
          return;
        }
      }
    }
    out.push_back({v, v + n0, v + n1});
  };
  for (size_t i = 1; i < n - 1; ++i) join(i, dir_of(i - 1), dir_of(i));
  if (closed) {
    join(0, dir_of(n - 1), dir_of(0));
    join(n - 1, dir_of(n - 2), dir_of(n - 1));
    return;
  }

  auto cap = [&](Point p, Point outward) {
    if (item.cap == LineCap::kRound) {
      out.push_back(CirclePolygon(p, hw, circle_segments));
    } else if (item.cap == LineCap::kSquare) {
      const Point nn = normal(outward);
      const Point ext = outward * hw;
      out.push_back({p + nn, p + nn + ext, p - nn + ext, p - nn});
    }
  };
  cap(pts[0], dir_of(0) * -1.0);
  cap(pts[n - 1], dir_of(n - 2));
}

double SignedArea(const std::vector<Point>& poly) {
  double area = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    area += internal::Cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return area / 2.0;
}

void TransformAll(std::vector<std::vector<Point>>& polys, const Affine& m, size_t& budget) {
  for (auto& poly : polys) {
    if (poly.size() > budget) {
      throw Error(ErrorCode::kRenderFailure, "geometry exceeds point budget");
    }
    budget -= poly.size();
    for (auto& p : poly) {
      p = m.Apply(p);
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw Error(ErrorCode::kRenderFailure, "non-finite coordinate");
      }
    }
  }
}

struct ViewBox {
  double x, y, w, h;
};

}  // namespace

RasterImage Rasterize(const SvgDocument& doc, int target_size, RasterizeInfo* info) {
  if (target_size < 1) {
    throw Error(ErrorCode::kRenderFailure, "target size must be positive");
  }
  const XmlElement& root = doc.root();
  RasterizeInfo local_info;

  std::optional<ViewBox> view_box;
  if (const auto* vb = root.Attribute("viewBox")) {
    const auto v = internal::ParseNumberList(*vb);
    if (v.size() != 4 || !(v[2] > 0) || !(v[3] > 0)) {
      throw Error(ErrorCode::kRenderFailure, "invalid viewBox \"" + *vb + "\"");
    }
    view_box = ViewBox{v[0], v[1], v[2], v[3]};
  }
  for (const char* dim : {"width", "height"}) {
    if (const auto* v = root.Attribute(dim)) {
      if (auto len = ParseAbsoluteLength(*v); len && *len < 0) {
        throw Error(ErrorCode::kRenderFailure, std::string("negative root ") + dim);
      }
    }
  }
  if (!view_box && doc.width_hint() && doc.height_hint()) {
    view_box = ViewBox{0, 0, *doc.width_hint(), *doc.height_hint()};
  }

  const double percent_w = view_box ? view_box->w : 100.0;
  const double percent_h = view_box ? view_box->h : 100.0;
  SceneBuilder builder(root, percent_w, percent_h);
  const std::vector<DrawItem> items = builder.Build(root, Affine{});
  local_info.drawn_elements = static_cast<int>(items.size());

  if (!view_box) {
    local_info.viewport_from_geometry = true;
    Box box;
    for (const auto& item : items) {
      const double margin = item.stroke ? item.stroke_width / 2.0 * item.to_root.MaxScale() : 0.0;
      for (const auto& sub : item.path.subpaths) {
        box.Add(item.to_root.Apply(sub.start), margin);
        for (const auto& seg : sub.segments) {
          if (seg.kind == internal::PathSegment::Kind::kCubic) {
            box.Add(item.to_root.Apply(seg.c1), margin);
            box.Add(item.to_root.Apply(seg.c2), margin);
          }
          box.Add(item.to_root.Apply(seg.end), margin);
        }
      }
    }
    if (box.empty() || !std::isfinite(box.width()) || !std::isfinite(box.height()) ||
        (box.width() <= 0 && box.height() <= 0)) {
      if (info) *info = local_info;
      return RasterImage(target_size, target_size);
    }
    view_box = ViewBox{box.min_x, box.min_y, box.width(), box.height()};
  }

  const double extent = std::max(view_box->w, view_box->h);
  const double scale = target_size / extent;
  const double off_x = (target_size - view_box->w * scale) / 2.0;
  const double off_y = (target_size - view_box->h * scale) / 2.0;
  const Affine device = Affine::Translate(off_x, off_y) * Affine::Scale(scale, scale) *
                        Affine::Translate(-view_box->x, -view_box->y);
  if (!std::isfinite(scale) || scale <= 0) {
    throw Error(ErrorCode::kRenderFailure, "degenerate viewport");
  }

  RasterImage img(target_size, target_size);
  CoverageRasterizer coverage(target_size, off_x, off_y, off_x + view_box->w * scale,
                              off_y + view_box->h * scale);
  size_t budget = kMaxPoints;
  for (const DrawItem& item : items) {
    const Affine m = device * item.to_root;
    const double max_scale = m.MaxScale();
    if (!std::isfinite(max_scale)) {
      throw Error(ErrorCode::kRenderFailure, "non-finite transform");
    }
    if (max_scale <= 0) continue;
    const std::vector<Polyline> lines =
        internal::Flatten(item.path, kFlattenTolerancePx / max_scale);

    if (item.fill) {
      std::vector<std::vector<Point>> polys;
      for (const auto& line : lines) polys.push_back(line.points);
      TransformAll(polys, m, budget);
      coverage.FillAndComposite(polys, item.evenodd, *item.fill, img);
    }
    if (item.stroke) {
      const double device_radius = item.stroke_width / 2.0 * max_scale;
      const int circle_segments = std::clamp(
          static_cast<int>(std::ceil(2.0 * std::numbers::pi * device_radius / 0.5)), 8, 256);
      std::vector<std::vector<Point>> polys;
      for (const auto& line : lines) StrokeOutline(line, item, circle_segments, polys);
      TransformAll(polys, m, budget);
      for (auto& poly : polys) {
        if (SignedArea(poly) < 0) std::reverse(poly.begin(), poly.end());
      }
      coverage.FillAndComposite(polys, false, *item.stroke, img);
    }
  }
  if (info) *info = local_info;
  return img;
}

}  // namespace svgauge

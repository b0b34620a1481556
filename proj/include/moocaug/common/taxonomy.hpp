#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace moocaug {

// The closed element taxonomy: five basic kinds carrying slide content and
// four auxiliary kinds.
enum class ElementKind {
  kText,
  kFigure,
  kTable,
  kEquation,
  kCodeBlock,
  kTeacherImage,
  kSubtitle,
  kTest,
  kExample,
};

inline constexpr std::array<ElementKind, 9> kAllElementKinds = {
    ElementKind::kText,         ElementKind::kFigure,   ElementKind::kTable,
    ElementKind::kEquation,     ElementKind::kCodeBlock, ElementKind::kTeacherImage,
    ElementKind::kSubtitle,     ElementKind::kTest,     ElementKind::kExample,
};

constexpr bool is_basic(ElementKind k) {
  switch (k) {
    case ElementKind::kText:
    case ElementKind::kFigure:
    case ElementKind::kTable:
    case ElementKind::kEquation:
    case ElementKind::kCodeBlock:
      return true;
    default:
      return false;
  }
}

constexpr bool is_auxiliary(ElementKind k) { return !is_basic(k); }

std::string_view to_string(ElementKind k);

// Accepts the canonical names ("CodeBlock", "TeacherImage", ...) in any case.
std::optional<ElementKind> parse_element_kind(std::string_view name);

// Normalized axis-aligned box; (x, y) is the top-left corner.
struct BBox {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }
  double center_x() const { return x + w / 2; }
  double center_y() const { return y + h / 2; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

bool inside_unit_square(const BBox& b, double tolerance = 1e-9);
BBox bbox_union(const BBox& a, const BBox& b);
double iou(const BBox& a, const BBox& b);

}  // namespace moocaug

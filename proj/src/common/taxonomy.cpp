#include "moocaug/common/taxonomy.hpp"

#include <algorithm>

#include "moocaug/common/text.hpp"

namespace moocaug {

std::string_view to_string(ElementKind k) {
  switch (k) {
    case ElementKind::kText: return "Text";
    case ElementKind::kFigure: return "Figure";
    case ElementKind::kTable: return "Table";
    case ElementKind::kEquation: return "Equation";
    case ElementKind::kCodeBlock: return "CodeBlock";
    case ElementKind::kTeacherImage: return "TeacherImage";
    case ElementKind::kSubtitle: return "Subtitle";
    case ElementKind::kTest: return "Test";
    case ElementKind::kExample: return "Example";
  }
  return "?";
}

std::optional<ElementKind> parse_element_kind(std::string_view name) {
  const auto lowered = ascii_lower(name);
  for (const auto k : kAllElementKinds) {
    if (ascii_lower(to_string(k)) == lowered) return k;
  }
  return std::nullopt;
}

bool inside_unit_square(const BBox& b, double tolerance) {
  return b.x >= -tolerance && b.y >= -tolerance && b.w >= 0 && b.h >= 0 &&
         b.right() <= 1 + tolerance && b.bottom() <= 1 + tolerance;
}

BBox bbox_union(const BBox& a, const BBox& b) {
  const double x0 = std::min(a.x, b.x);
  const double y0 = std::min(a.y, b.y);
  const double x1 = std::max(a.right(), b.right());
  const double y1 = std::max(a.bottom(), b.bottom());
  return {x0, y0, x1 - x0, y1 - y0};
}

double iou(const BBox& a, const BBox& b) {
  const double ix = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return uni > 0 ? inter / uni : 0.0;
}

}  // namespace moocaug

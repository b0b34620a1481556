#include <algorithm>
#include <cstdint>
#include <limits>

#include "moocaug/common/text.hpp"
#include "moocaug/elements/elements.hpp"

namespace moocaug::elements {
namespace {

// Decodes one code point starting at s[i]; advances i. Input is valid UTF-8
// (checked at ingest), but stray bytes decode as themselves.
char32_t next_code_point(std::string_view s, std::size_t& i) {
  const auto b = static_cast<unsigned char>(s[i]);
  int len = 1;
  char32_t cp = b;
  if (b >= 0xF0) {
    len = 4;
    cp = b & 0x07;
  } else if (b >= 0xE0) {
    len = 3;
    cp = b & 0x0F;
  } else if (b >= 0xC0) {
    len = 2;
    cp = b & 0x1F;
  }
  if (i + static_cast<std::size_t>(len) > s.size()) len = 1, cp = b;
  for (int k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
  i += static_cast<std::size_t>(len);
  return cp;
}

bool is_space(char32_t c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_math_symbol(char32_t c) {
  if (c < 0x80) return std::u32string_view(U"=+-*/^<>|~").find(c) != std::u32string_view::npos;
  return c == 0x00B1 || c == 0x00D7 || c == 0x00F7 || c == 0x00B2 || c == 0x00B3 ||
         (c >= 0x0370 && c <= 0x03FF) ||  // Greek
         (c >= 0x2070 && c <= 0x209F) ||  // super/subscripts
         (c >= 0x2190 && c <= 0x21FF) ||  // arrows
         (c >= 0x2200 && c <= 0x22FF) ||  // mathematical operators
         (c >= 0x27C0 && c <= 0x27EF) || (c >= 0x2980 && c <= 0x2AFF);
}

template <typename Pred>
double ratio_of(std::string_view text, Pred pred) {
  std::size_t total = 0, hits = 0;
  for (std::size_t i = 0; i < text.size();) {
    const char32_t c = next_code_point(text, i);
    if (is_space(c)) continue;
    ++total;
    if (pred(c)) ++hits;
  }
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

struct Block {
  std::vector<const TextBox*> lines;
  BBox bbox;
  Interval t_range;
};

bool horizontally_overlap(const BBox& a, const BBox& b) { return a.x < b.right() && b.x < a.right(); }

}  // namespace

double symbol_ratio(std::string_view text) { return ratio_of(text, is_math_symbol); }

double code_punctuation_ratio(std::string_view text) {
  static constexpr std::u32string_view kCodePunct = U"{}()[];:=<>.,#\"'_\\/|&!*+-%";
  return ratio_of(text, [](char32_t c) { return kCodePunct.find(c) != std::u32string_view::npos; });
}

bool has_indent_structure(std::string_view text) {
  std::vector<std::size_t> indents;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = std::min(text.find('\n', start), text.size());
    const std::string_view line = text.substr(start, nl - start);
    if (!trim(line).empty()) {
      std::size_t indent = 0;
      for (const char c : line) {
        if (c == ' ') ++indent;
        else if (c == '\t') indent += 4;
        else break;
      }
      indents.push_back(indent);
    }
    start = nl + 1;
  }
  if (indents.size() < 2) return false;
  std::size_t unit = std::numeric_limits<std::size_t>::max();
  for (const auto i : indents)
    if (i > 0) unit = std::min(unit, i);
  if (unit == std::numeric_limits<std::size_t>::max()) return false;
  return std::all_of(indents.begin(), indents.end(), [&](std::size_t i) { return i % unit == 0; });
}

std::vector<Element> fallback_layout_detect(const std::vector<TextBox>& boxes, const FallbackOptions& options) {
  std::vector<const TextBox*> order;
  for (const auto& b : boxes) order.push_back(&b);
  std::stable_sort(order.begin(), order.end(), [](const TextBox* a, const TextBox* b) {
    if (a->segment_index != b->segment_index) return a->segment_index < b->segment_index;
    if (a->bbox.y != b->bbox.y) return a->bbox.y < b->bbox.y;
    return a->bbox.x < b->bbox.x;
  });

  std::vector<Block> blocks;
  for (const TextBox* box : order) {
    Block* target = nullptr;
    double best_gap = std::numeric_limits<double>::infinity();
    for (auto& block : blocks) {
      if (block.lines.front()->segment_index != box->segment_index) continue;
      if (!block.t_range.overlaps(box->t_range)) continue;
      if (!horizontally_overlap(block.bbox, box->bbox)) continue;
      const double gap = box->bbox.y - block.bbox.bottom();
      if (gap > options.block_gap) continue;
      const double key = std::max(gap, 0.0);
      if (key < best_gap) {
        best_gap = key;
        target = &block;
      }
    }
    if (target == nullptr) {
      blocks.push_back({{box}, box->bbox, box->t_range});
    } else {
      target->lines.push_back(box);
      target->bbox = bbox_union(target->bbox, box->bbox);
      target->t_range = {std::min(target->t_range.start_ms, box->t_range.start_ms),
                         std::max(target->t_range.end_ms, box->t_range.end_ms)};
    }
  }

  std::vector<Element> out;
  for (const auto& block : blocks) {
    std::string text;
    bool handwritten = false;
    for (const TextBox* line : block.lines) {
      if (!text.empty()) text += '\n';
      text += line->text;
      handwritten = handwritten || line->handwritten;
    }
    Element e;
    e.segment_index = block.lines.front()->segment_index;
    e.t_range = block.t_range;
    e.bbox = block.bbox;
    e.provenance = Provenance::kFallback;
    e.confidence = 0.5;
    e.handwritten = handwritten;
    if (symbol_ratio(text) > options.equation_symbol_ratio) {
      e.kind = ElementKind::kEquation;
    } else if (has_indent_structure(text) && code_punctuation_ratio(text) > options.code_punctuation_density) {
      e.kind = ElementKind::kCodeBlock;
    } else {
      e.kind = ElementKind::kText;
    }
    e.text = std::move(text);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace moocaug::elements

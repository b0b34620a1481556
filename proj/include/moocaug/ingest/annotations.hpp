#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "moocaug/common/interval.hpp"
#include "moocaug/common/taxonomy.hpp"

namespace moocaug::ingest {

struct AnnotationFlags {
  bool handwritten = false;
  bool teacher_head = false;
  friend bool operator==(const AnnotationFlags&, const AnnotationFlags&) = default;
};

struct AnnotationEntry {
  Interval t_range;
  std::optional<ElementKind> kind_hint;
  BBox bbox;
  std::optional<std::string> text;
  AnnotationFlags flags;
  friend bool operator==(const AnnotationEntry&, const AnnotationEntry&) = default;
};

// Invariant: every bbox inside the unit square.
struct AnnotationSet {
  std::vector<AnnotationEntry> entries;
  friend bool operator==(const AnnotationSet&, const AnnotationSet&) = default;
};

// Annotation document (see docs/formats.md):
//   {"schema": "moocaug-annotations", "version": 1,
//    "units": "normalized" | "pixels", "frame_size": {"width", "height"},
//    "entries": [{"t_range_ms": [s, e], "kind": "Figure", "text": "...",
//                 "bbox": {"x", "y", "w", "h"},
//                 "flags": {"handwritten": bool, "teacher_head": bool}}]}
// Bboxes are normalized (pixel units divided by frame_size) and values within
// 1e-6 of the unit square are clamped onto it. Any violation rejects the whole
// document with IngestError(kSchemaViolation) naming the JSON pointer.
AnnotationSet parse_annotations(std::string_view json_text);
AnnotationSet load_annotations(const std::filesystem::path& path);

std::string serialize_annotations(const AnnotationSet& set);

}  // namespace moocaug::ingest

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "moocaug/common/canonical_json.hpp"
#include "moocaug/common/error.hpp"
#include "moocaug/common/interval.hpp"
#include "moocaug/common/json_transport.hpp"
#include "moocaug/common/taxonomy.hpp"
#include "moocaug/ingest/annotations.hpp"
#include "moocaug/ingest/transcript.hpp"
#include "moocaug/slideseg/segmentation.hpp"

namespace moocaug::elements {

enum class Provenance { kDetectorClient, kAnnotation, kFallback };

std::string_view to_string(Provenance p);

struct Element {
  std::string id;
  ElementKind kind = ElementKind::kText;
  std::size_t segment_index = 0;
  Interval t_range;
  BBox bbox;
  std::optional<std::string> text;
  std::vector<std::string> concept_ids;
  Provenance provenance = Provenance::kFallback;
  double confidence = 0.5;
  bool handwritten = false;

  friend bool operator==(const Element&, const Element&) = default;
};

struct DroppedEntry {
  std::string source;  // "detector", "annotations"
  std::size_t segment_index = 0;
  std::size_t entry_index = 0;
  std::string reason;
};

enum class ElementsErrc { kClientUnreachable, kInvalidResponse };

using ElementsError = CodedError<ElementsErrc>;

// ---- detector client ------------------------------------------------------

inline constexpr std::string_view kDetectorProtocol = "mooc-detector/1";

struct KeyframeRef {
  std::size_t segment_index = 0;
  std::string image_ref;      // path relative to the course assets
  std::string image_base64;   // optional inline copy
};

struct ClientOptions {
  std::string path = "/detect";
  std::size_t max_concurrency = 4;
};

struct ClientResult {
  std::vector<Element> elements;
  std::vector<DroppedEntry> dropped;
};

// One request per keyframe:
//   {"protocol": "mooc-detector/1", "segment_index": i,
//    "keyframe": {"ref": "...", "base64": "..."}}
// Response: {"protocol": "mooc-detector/1",
//            "entries": [{"kind", "bbox": {x,y,w,h}, "text"?, "confidence"}]}
// Entries outside the taxonomy, with bboxes off the unit square or with
// confidence outside [0,1] are dropped with a reason. Elements span their
// segment. Throws kClientUnreachable on transport failure and
// kInvalidResponse when a response is not an object of this protocol.
ClientResult classify_via_client(JsonTransport& client, const std::vector<KeyframeRef>& keyframes,
                                 const std::vector<slideseg::SlideSegment>& segments,
                                 const ClientOptions& options = {});

// ---- rule-based fallback --------------------------------------------------

struct FallbackOptions {
  // Boxes join a block when the vertical gap to it is at most this (in
  // normalized height) and their horizontal extents overlap.
  double block_gap = 0.03;
  double equation_symbol_ratio = 0.3;
  double code_punctuation_density = 0.15;
};

struct TextBox {
  std::size_t segment_index = 0;
  Interval t_range;
  BBox bbox;
  std::string text;
  bool handwritten = false;
};

// Fraction of non-whitespace code points that are mathematical symbols:
// = + - * / ^ < > | ~, and Greek letters, arrows, super/subscripts and the
// mathematical operator blocks.
double symbol_ratio(std::string_view text);

// Fraction of non-whitespace characters in  {}()[];:=<>.,#"'_\/|&!*+-%
double code_punctuation_ratio(std::string_view text);

// Two or more lines, at least one indented, and every indent a multiple of
// the smallest one.
bool has_indent_structure(std::string_view text);

// Groups boxes of one segment into blocks (reading order top to bottom) and
// labels each Equation, CodeBlock or Text. Provenance Fallback, confidence 0.5.
std::vector<Element> fallback_layout_detect(const std::vector<TextBox>& boxes, const FallbackOptions& options = {});

// ---- auxiliary kinds --------------------------------------------------------

struct AuxiliaryOptions {
  std::vector<std::string> test_lexicon;     // empty: shipped defaults
  std::vector<std::string> example_lexicon;  // empty: shipped defaults
  double question_mark_density = 0.05;
  BBox subtitle_region{0.1, 0.85, 0.8, 0.1};
};

enum class AuxiliaryLabel { kNone, kTest, kExample };

// Test is checked first: a test-lexicon hit or a '?' count above the density
// threshold (per byte of text). Then the example lexicon.
AuxiliaryLabel auxiliary_label(std::string_view text, const AuxiliaryOptions& options = {});

struct TeacherFrame {
  std::size_t segment_index = 0;
  Interval t_range;
  BBox bbox;
};

// Relabels Text elements whose text is a Test or Example, adds one Test or
// Example element per matching cue (the cue window) and one TeacherImage per
// teacher-head annotation flag. Cue-window elements sit in the subtitle
// region; their t_range is the cue clipped to the segment holding its start.
std::vector<Element> classify_auxiliary(std::vector<Element> elements, const ingest::Transcript& transcript,
                                        const std::vector<TeacherFrame>& teacher_frames,
                                        const std::vector<slideseg::SlideSegment>& segments,
                                        const AuxiliaryOptions& options = {});

// ---- whole-course assembly --------------------------------------------------

struct ElementOptions {
  FallbackOptions fallback;
  AuxiliaryOptions auxiliary;
  double annotation_wins_iou = 0.5;
};

struct ElementSet {
  std::vector<Element> elements;
  std::vector<DroppedEntry> dropped;
  // Per segment: any handwritten annotation text falls in it.
  std::vector<bool> handwritten_segments;
  std::vector<bool> teacher_segments;
};

// Index of the segment containing t, or nullopt when t is outside the course.
std::optional<std::size_t> segment_at(const std::vector<slideseg::SlideSegment>& segments, std::int64_t t_ms);

// Combines everything into the course element list:
//  - annotations with a kind become Annotation elements (confidence 1);
//  - teacher-head annotations become TeacherImage elements;
//  - remaining annotations with text go through the fallback detector;
//  - client elements overlapping an annotation element of the same segment
//    by more than annotation_wins_iou are discarded;
//  - auxiliary relabeling and cue windows;
//  - one Subtitle element per cue.
// Annotation t_ranges are clipped to the segment holding their start.
// Elements are ordered by (segment, start, kind, y, x, text) and numbered
// "el-0001", "el-0002", ...
ElementSet assemble_elements(const std::vector<slideseg::SlideSegment>& segments, const ingest::AnnotationSet& annotations,
                             const ingest::Transcript& transcript, const ClientResult* client,
                             const ElementOptions& options = {});

Json to_json(const Element& e);

}  // namespace moocaug::elements

#include "moocaug/elements/elements.hpp"

#include <algorithm>
#include <cstdio>
#include <string>
#include <tuple>

#include "moocaug/common/parallel.hpp"
#include "moocaug/common/text.hpp"

namespace moocaug::elements {
namespace {

const std::vector<std::string>& default_test_lexicon() {
  static const auto words = parse_word_list(defaults::test_lexicon());
  return words;
}

const std::vector<std::string>& default_example_lexicon() {
  static const auto words = parse_word_list(defaults::example_lexicon());
  return words;
}

bool lexicon_hit(const std::string& lowered, const std::vector<std::string>& lexicon) {
  return std::any_of(lexicon.begin(), lexicon.end(),
                     [&](const std::string& entry) { return contains_at_word_boundary(lowered, entry); });
}

Interval clip(const Interval& r, const slideseg::SlideSegment& seg) {
  return {std::max(r.start_ms, seg.start_ms), std::min(r.end_ms, seg.end_ms)};
}

Element parse_client_entry(const Json& entry, std::size_t segment_index, const slideseg::SlideSegment& segment,
                           std::string& reason) {
  Element e;
  e.segment_index = segment_index;
  e.t_range = {segment.start_ms, segment.end_ms};
  e.provenance = Provenance::kDetectorClient;
  if (!entry.is_object()) {
    reason = "entry is not an object";
    return e;
  }
  const auto kind = entry.find("kind");
  if (kind == entry.end() || !kind->is_string()) {
    reason = "missing kind";
    return e;
  }
  const auto parsed = parse_element_kind(kind->get<std::string>());
  if (!parsed) {
    reason = "unknown kind";
    return e;
  }
  e.kind = *parsed;
  const auto bbox = entry.find("bbox");
  if (bbox == entry.end() || !bbox->is_object()) {
    reason = "missing bbox";
    return e;
  }
  for (const char* key : {"x", "y", "w", "h"}) {
    const auto it = bbox->find(key);
    if (it == bbox->end() || !it->is_number()) {
      reason = std::string("bbox.") + key + " is not a number";
      return e;
    }
  }
  e.bbox = {(*bbox)["x"].get<double>(), (*bbox)["y"].get<double>(), (*bbox)["w"].get<double>(),
            (*bbox)["h"].get<double>()};
  if (e.bbox.w <= 0 || e.bbox.h <= 0 || !inside_unit_square(e.bbox)) {
    reason = "bbox outside the unit square";
    return e;
  }
  const auto conf = entry.find("confidence");
  if (conf == entry.end() || !conf->is_number()) {
    reason = "missing confidence";
    return e;
  }
  e.confidence = conf->get<double>();
  if (!(e.confidence >= 0 && e.confidence <= 1)) {
    reason = "confidence outside [0,1]";
    return e;
  }
  if (const auto text = entry.find("text"); text != entry.end() && !text->is_null()) {
    if (!text->is_string()) {
      reason = "text is not a string";
      return e;
    }
    e.text = text->get<std::string>();
  }
  return e;
}

int kind_rank(ElementKind k) { return static_cast<int>(k); }

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kDetectorClient:
      return "DetectorClient";
    case Provenance::kAnnotation:
      return "Annotation";
    case Provenance::kFallback:
      return "Fallback";
  }
  return "Fallback";
}

ClientResult classify_via_client(JsonTransport& client, const std::vector<KeyframeRef>& keyframes,
                                 const std::vector<slideseg::SlideSegment>& segments, const ClientOptions& options) {
  struct Reply {
    std::vector<Element> elements;
    std::vector<DroppedEntry> dropped;
  };
  const auto replies = parallel_map(keyframes, options.max_concurrency, [&](const KeyframeRef& kf) {
    Json request = {{"protocol", kDetectorProtocol}, {"segment_index", kf.segment_index},
                    {"keyframe", {{"ref", kf.image_ref}}}};
    if (!kf.image_base64.empty()) request["keyframe"]["base64"] = kf.image_base64;
    Json response;
    try {
      response = client.post(options.path, request);
    } catch (const TransportError& e) {
      if (e.code() == TransportErrc::kInvalidPayload) throw ElementsError(ElementsErrc::kInvalidResponse, e.what());
      throw ElementsError(ElementsErrc::kClientUnreachable, e.what());
    }
    const std::string where = "segment " + std::to_string(kf.segment_index);
    if (!response.is_object()) throw ElementsError(ElementsErrc::kInvalidResponse, where + ": response is not an object");
    const auto protocol = response.find("protocol");
    if (protocol == response.end() || *protocol != std::string(kDetectorProtocol)) {
      throw ElementsError(ElementsErrc::kInvalidResponse, where + ": unsupported protocol");
    }
    const auto entries = response.find("entries");
    if (entries == response.end() || !entries->is_array()) {
      throw ElementsError(ElementsErrc::kInvalidResponse, where + ": entries is not an array");
    }
    if (kf.segment_index >= segments.size()) {
      throw ElementsError(ElementsErrc::kInvalidResponse, where + ": no such segment");
    }
    Reply reply;
    for (std::size_t i = 0; i < entries->size(); ++i) {
      std::string reason;
      Element e = parse_client_entry((*entries)[i], kf.segment_index, segments[kf.segment_index], reason);
      if (reason.empty()) {
        reply.elements.push_back(std::move(e));
      } else {
        reply.dropped.push_back({"detector", kf.segment_index, i, reason});
      }
    }
    return reply;
  });
  ClientResult result;
  for (const auto& r : replies) {
    result.elements.insert(result.elements.end(), r.elements.begin(), r.elements.end());
    result.dropped.insert(result.dropped.end(), r.dropped.begin(), r.dropped.end());
  }
  return result;
}

AuxiliaryLabel auxiliary_label(std::string_view text, const AuxiliaryOptions& options) {
  const std::string lowered = ascii_lower(text);
  const auto& tests = options.test_lexicon.empty() ? default_test_lexicon() : options.test_lexicon;
  const auto& examples = options.example_lexicon.empty() ? default_example_lexicon() : options.example_lexicon;
  const auto questions = static_cast<double>(std::count(lowered.begin(), lowered.end(), '?'));
  if (lexicon_hit(lowered, tests) ||
      (!lowered.empty() && questions / static_cast<double>(lowered.size()) > options.question_mark_density)) {
    return AuxiliaryLabel::kTest;
  }
  if (lexicon_hit(lowered, examples)) return AuxiliaryLabel::kExample;
  return AuxiliaryLabel::kNone;
}

std::optional<std::size_t> segment_at(const std::vector<slideseg::SlideSegment>& segments, std::int64_t t_ms) {
  const auto it = std::upper_bound(segments.begin(), segments.end(), t_ms,
                                   [](std::int64_t t, const slideseg::SlideSegment& s) { return t < s.end_ms; });
  if (it == segments.end() || t_ms < it->start_ms) return std::nullopt;
  return static_cast<std::size_t>(it - segments.begin());
}

std::vector<Element> classify_auxiliary(std::vector<Element> elements, const ingest::Transcript& transcript,
                                        const std::vector<TeacherFrame>& teacher_frames,
                                        const std::vector<slideseg::SlideSegment>& segments,
                                        const AuxiliaryOptions& options) {
  for (auto& e : elements) {
    if (e.kind != ElementKind::kText || !e.text) continue;
    switch (auxiliary_label(*e.text, options)) {
      case AuxiliaryLabel::kTest:
        e.kind = ElementKind::kTest;
        break;
      case AuxiliaryLabel::kExample:
        e.kind = ElementKind::kExample;
        break;
      case AuxiliaryLabel::kNone:
        break;
    }
  }
  for (const auto& cue : transcript.cues) {
    const auto label = auxiliary_label(cue.text, options);
    if (label == AuxiliaryLabel::kNone) continue;
    const auto seg = segment_at(segments, cue.start_ms);
    if (!seg) continue;
    Element e;
    e.kind = label == AuxiliaryLabel::kTest ? ElementKind::kTest : ElementKind::kExample;
    e.segment_index = *seg;
    e.t_range = clip(cue.interval(), segments[*seg]);
    e.bbox = options.subtitle_region;
    e.text = cue.text;
    e.provenance = Provenance::kFallback;
    e.confidence = 0.5;
    elements.push_back(std::move(e));
  }
  for (const auto& tf : teacher_frames) {
    Element e;
    e.kind = ElementKind::kTeacherImage;
    e.segment_index = tf.segment_index;
    e.t_range = tf.t_range;
    e.bbox = tf.bbox;
    e.provenance = Provenance::kAnnotation;
    e.confidence = 1.0;
    elements.push_back(std::move(e));
  }
  return elements;
}

ElementSet assemble_elements(const std::vector<slideseg::SlideSegment>& segments, const ingest::AnnotationSet& annotations,
                             const ingest::Transcript& transcript, const ClientResult* client,
                             const ElementOptions& options) {
  ElementSet out;
  out.handwritten_segments.assign(segments.size(), false);
  out.teacher_segments.assign(segments.size(), false);

  std::vector<Element> annotated;
  std::vector<TextBox> boxes;
  std::vector<TeacherFrame> teachers;
  for (std::size_t i = 0; i < annotations.entries.size(); ++i) {
    const auto& a = annotations.entries[i];
    const auto seg = segment_at(segments, a.t_range.start_ms);
    if (!seg) {
      out.dropped.push_back({"annotations", 0, i, "starts outside the course"});
      continue;
    }
    const Interval range = clip(a.t_range, segments[*seg]);
    if (a.flags.teacher_head || a.kind_hint == ElementKind::kTeacherImage) {
      teachers.push_back({*seg, range, a.bbox});
      out.teacher_segments[*seg] = true;
      continue;
    }
    if (a.flags.handwritten) out.handwritten_segments[*seg] = true;
    if (a.kind_hint) {
      Element e;
      e.kind = *a.kind_hint;
      e.segment_index = *seg;
      e.t_range = range;
      e.bbox = a.bbox;
      e.text = a.text;
      e.provenance = Provenance::kAnnotation;
      e.confidence = 1.0;
      e.handwritten = a.flags.handwritten;
      annotated.push_back(std::move(e));
    } else if (a.text && !trim(*a.text).empty()) {
      boxes.push_back({*seg, range, a.bbox, *a.text, a.flags.handwritten});
    } else {
      out.dropped.push_back({"annotations", *seg, i, "no kind and no text"});
    }
  }

  std::vector<Element> all = annotated;
  for (auto& e : fallback_layout_detect(boxes, options.fallback)) all.push_back(std::move(e));
  if (client != nullptr) {
    out.dropped.insert(out.dropped.end(), client->dropped.begin(), client->dropped.end());
    for (const auto& c : client->elements) {
      const bool shadowed = std::any_of(annotated.begin(), annotated.end(), [&](const Element& a) {
        return a.segment_index == c.segment_index && iou(a.bbox, c.bbox) > options.annotation_wins_iou;
      });
      if (shadowed) {
        out.dropped.push_back({"detector", c.segment_index, 0, "overlaps an annotation"});
        continue;
      }
      all.push_back(c);
    }
  }
  all = classify_auxiliary(std::move(all), transcript, teachers, segments, options.auxiliary);

  for (const auto& cue : transcript.cues) {
    const auto seg = segment_at(segments, cue.start_ms);
    if (!seg) continue;
    Element e;
    e.kind = ElementKind::kSubtitle;
    e.segment_index = *seg;
    e.t_range = clip(cue.interval(), segments[*seg]);
    e.bbox = options.auxiliary.subtitle_region;
    e.text = cue.text;
    e.provenance = Provenance::kFallback;
    e.confidence = 1.0;
    all.push_back(std::move(e));
  }

  std::stable_sort(all.begin(), all.end(), [](const Element& a, const Element& b) {
    return std::make_tuple(a.segment_index, a.t_range.start_ms, kind_rank(a.kind), a.bbox.y, a.bbox.x,
                           a.text.value_or("")) <
           std::make_tuple(b.segment_index, b.t_range.start_ms, kind_rank(b.kind), b.bbox.y, b.bbox.x,
                           b.text.value_or(""));
  });
  char id[32];
  for (std::size_t i = 0; i < all.size(); ++i) {
    std::snprintf(id, sizeof id, "el-%04zu", i + 1);
    all[i].id = id;
  }
  out.elements = std::move(all);
  return out;
}

Json to_json(const Element& e) {
  Json j = {{"id", e.id},
            {"kind", to_string(e.kind)},
            {"segment_index", e.segment_index},
            {"t_range_ms", {e.t_range.start_ms, e.t_range.end_ms}},
            {"bbox", {{"x", e.bbox.x}, {"y", e.bbox.y}, {"w", e.bbox.w}, {"h", e.bbox.h}}},
            {"concept_ids", e.concept_ids},
            {"provenance", to_string(e.provenance)},
            {"confidence", e.confidence},
            {"handwritten", e.handwritten}};
  j["text"] = e.text ? Json(*e.text) : Json(nullptr);
  return j;
}

}  // namespace moocaug::elements

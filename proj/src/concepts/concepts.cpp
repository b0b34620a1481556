#include "moocaug/concepts/concepts.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>

namespace moocaug::concepts {
namespace {

std::vector<std::string> lemmas_of(const TextAnalyzer& analyzer, std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : analyzer.analyze(text)) out.push_back(std::move(t.lemma));
  return out;
}

bool contains_sequence(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

}  // namespace

std::string_view to_string(DeliveryStyle s) {
  switch (s) {
    case DeliveryStyle::kWhiteboardAnnotation:
      return "WhiteboardAnnotation";
    case DeliveryStyle::kSlideBased:
      return "SlideBased";
    case DeliveryStyle::kDirectLecture:
      return "DirectLecture";
  }
  return "SlideBased";
}

LinkResult link_mentions(const std::vector<Keyphrase>& labels, const ingest::Transcript& transcript,
                         std::vector<elements::Element>& elements, const TextAnalyzer& analyzer) {
  std::vector<std::vector<std::string>> cue_lemmas;
  for (const auto& cue : transcript.cues) cue_lemmas.push_back(lemmas_of(analyzer, cue.text));
  std::vector<std::vector<std::string>> element_lemmas;
  for (const auto& e : elements) element_lemmas.push_back(e.text ? lemmas_of(analyzer, *e.text) : std::vector<std::string>{});

  LinkResult result;
  std::vector<std::vector<std::size_t>> element_hits;
  for (const auto& kp : labels) {
    const auto needle = split_words(kp.label);
    Concept c;
    c.label = kp.label;
    c.textrank_score = kp.score;
    for (std::size_t i = 0; i < transcript.cues.size(); ++i) {
      if (!contains_sequence(cue_lemmas[i], needle)) continue;
      Mention m;
      m.t_ms = transcript.cues[i].start_ms;
      m.cue_index = i;
      m.interval = transcript.cues[i].interval();
      c.mentions.push_back(m);
    }
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < elements.size(); ++i) {
      if (!contains_sequence(element_lemmas[i], needle)) continue;
      hits.push_back(i);
      if (elements[i].kind == ElementKind::kSubtitle) continue;
      Mention m;
      m.t_ms = elements[i].t_range.start_ms;
      m.element_id = elements[i].id;
      m.interval = elements[i].t_range;
      c.mentions.push_back(m);
    }
    if (c.mentions.empty()) {
      result.warnings.push_back("concept label \"" + kp.label + "\" has no mention; dropped");
      continue;
    }
    std::stable_sort(c.mentions.begin(), c.mentions.end(), [](const Mention& a, const Mention& b) {
      if (a.t_ms != b.t_ms) return a.t_ms < b.t_ms;
      return a.cue_index.has_value() && !b.cue_index.has_value();
    });
    result.concepts.push_back(std::move(c));
    element_hits.push_back(std::move(hits));
  }

  std::vector<std::size_t> order(result.concepts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ca = result.concepts[a];
    const auto& cb = result.concepts[b];
    if (ca.first_mention_ms() != cb.first_mention_ms()) return ca.first_mention_ms() < cb.first_mention_ms();
    return ca.label < cb.label;
  });
  std::vector<Concept> sorted;
  char id[32];
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    Concept c = std::move(result.concepts[order[rank]]);
    std::snprintf(id, sizeof id, "c-%02zu", rank + 1);
    c.id = id;
    for (const auto i : element_hits[order[rank]]) elements[i].concept_ids.push_back(c.id);
    sorted.push_back(std::move(c));
  }
  for (auto& e : elements) std::sort(e.concept_ids.begin(), e.concept_ids.end());
  result.concepts = std::move(sorted);
  return result;
}

std::vector<Interval> mention_spans(const Concept& c, std::int64_t gap_ms) {
  std::vector<Interval> cue_ranges, element_ranges;
  for (const auto& m : c.mentions) (m.cue_index ? cue_ranges : element_ranges).push_back(m.interval);
  return merge_intervals(cue_ranges.empty() ? element_ranges : cue_ranges, gap_ms);
}

std::int64_t compute_duration(const Concept& c, std::int64_t gap_ms) {
  return total_length(mention_spans(c, gap_ms));
}

std::vector<SegmentEvidence> delivery_evidence(const elements::ElementSet& set, std::size_t segment_count) {
  std::vector<SegmentEvidence> out(segment_count);
  for (std::size_t s = 0; s < segment_count; ++s) {
    if (s < set.handwritten_segments.size()) out[s].handwritten_text = set.handwritten_segments[s];
    if (s < set.teacher_segments.size()) out[s].teacher_head = set.teacher_segments[s];
  }
  for (const auto& e : set.elements) {
    if (e.segment_index >= segment_count) continue;
    if (e.handwritten) out[e.segment_index].handwritten_text = true;
    if (e.kind == ElementKind::kTeacherImage) out[e.segment_index].teacher_head = true;
    if (is_basic(e.kind) && !e.handwritten) out[e.segment_index].slide_present = true;
  }
  return out;
}

DeliveryStyle classify_delivery(const std::vector<Interval>& spans, const std::vector<slideseg::SlideSegment>& segments,
                                const std::vector<SegmentEvidence>& evidence) {
  // Keyed by flag bits; value is (total overlap, first segment seen).
  std::array<std::int64_t, 8> time{};
  std::array<std::size_t, 8> first{};
  first.fill(segments.size());
  const auto merged = merge_intervals(spans);
  for (std::size_t s = 0; s < segments.size() && s < evidence.size(); ++s) {
    const std::int64_t overlap = overlap_length({segments[s].start_ms, segments[s].end_ms}, merged);
    if (overlap <= 0) continue;
    const int key = (evidence[s].handwritten_text ? 4 : 0) | (evidence[s].teacher_head ? 2 : 0) |
                    (evidence[s].slide_present ? 1 : 0);
    time[static_cast<std::size_t>(key)] += overlap;
    first[static_cast<std::size_t>(key)] = std::min(first[static_cast<std::size_t>(key)], s);
  }
  int best = -1;
  for (int k = 0; k < 8; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    if (time[ku] == 0) continue;
    const auto bu = static_cast<std::size_t>(best);
    if (best < 0 || time[ku] > time[bu] || (time[ku] == time[bu] && first[ku] < first[bu])) best = k;
  }
  if (best < 0) return DeliveryStyle::kDirectLecture;
  if (best & 4) return DeliveryStyle::kWhiteboardAnnotation;
  if (best & 1) return DeliveryStyle::kSlideBased;
  return DeliveryStyle::kDirectLecture;
}

double raw_importance(std::int64_t duration_ms, const GraphDegrees& degrees, const ImportanceWeights& w) {
  return w.duration * std::log1p(static_cast<double>(duration_ms) / 1000.0) +
         w.association * static_cast<double>(degrees.association) +
         w.inclusion * static_cast<double>(degrees.inclusion) + w.similarity * static_cast<double>(degrees.similarity);
}

std::vector<double> normalize_importance(const std::vector<double>& raw) {
  if (raw.empty()) return {};
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  std::vector<double> out(raw.size(), 1.0);
  if (*hi - *lo <= 0) return out;
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - *lo) / (*hi - *lo);
  return out;
}

std::optional<std::size_t> active_concept(const std::vector<Concept>& concepts, std::int64_t t_ms) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    const auto& spans = concepts[i].spans;
    const bool active = std::any_of(spans.begin(), spans.end(), [&](const Interval& s) { return s.contains(t_ms); });
    if (active && (!best || concepts[i].importance > concepts[*best].importance)) best = i;
  }
  return best;
}

Json to_json(const Concept& c) {
  Json mentions = Json::array();
  for (const auto& m : c.mentions) {
    Json j = {{"t_ms", m.t_ms}, {"interval_ms", {m.interval.start_ms, m.interval.end_ms}}};
    if (m.cue_index) j["location"] = {{"type", "TranscriptCue"}, {"cue_index", *m.cue_index}};
    else j["location"] = {{"type", "Element"}, {"element_id", *m.element_id}};
    mentions.push_back(j);
  }
  Json spans = Json::array();
  for (const auto& s : c.spans) spans.push_back({s.start_ms, s.end_ms});
  return {{"id", c.id},
          {"label", c.label},
          {"mentions", mentions},
          {"spans_ms", spans},
          {"duration_ms", c.duration_ms},
          {"delivery_style", to_string(c.delivery_style)},
          {"importance", c.importance},
          {"textrank_score", c.textrank_score}};
}

}  // namespace moocaug::concepts

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "moocaug/common/canonical_json.hpp"
#include "moocaug/common/error.hpp"
#include "moocaug/common/interval.hpp"
#include "moocaug/common/text.hpp"
#include "moocaug/elements/elements.hpp"
#include "moocaug/ingest/transcript.hpp"
#include "moocaug/slideseg/segmentation.hpp"

namespace moocaug::concepts {

enum class ConceptsErrc { kEmptyInput, kInvalidParameter };

using ConceptsError = CodedError<ConceptsErrc>;

// ---- TextRank ---------------------------------------------------------------

struct TextRankOptions {
  std::size_t window = 4;  // tokens i and j co-occur when |i - j| < window
  double damping = 0.85;
  double tolerance = 1e-6;
  std::size_t max_iterations = 1000;
};

struct ScoredTerm {
  std::string term;
  double score = 0;
  friend bool operator==(const ScoredTerm&, const ScoredTerm&) = default;
};

struct TextRankResult {
  std::vector<ScoredTerm> terms;  // score descending, ties lexicographic
  std::size_t iterations = 0;
  double final_delta = 0;
};

// Weighted TextRank over the co-occurrence graph of the given token
// sequences; windows never cross sequence boundaries. Scores start at 1 and
// are updated synchronously until the largest change drops below tolerance.
// Throws kEmptyInput when no token is given, kInvalidParameter for
// window < 2 or damping outside (0, 1).
TextRankResult textrank(const std::vector<std::vector<std::string>>& sequences, const TextRankOptions& options = {});

// ---- keyphrases ---------------------------------------------------------------

struct KeyphraseOptions {
  double top_fraction = 1.0 / 3.0;  // T = ceil(top_fraction * |terms|)
  std::size_t max_concepts = 15;     // N
};

struct Keyphrase {
  std::string label;  // lemmas joined by spaces
  double score = 0;   // sum of member term scores
  friend bool operator==(const Keyphrase&, const Keyphrase&) = default;
};

// Every maximal run of adjacent top-T content tokens in a text becomes a
// candidate; the best N candidates by score (ties lexicographic) are
// returned. `texts` holds the analyzed tokens of each source text.
std::vector<Keyphrase> assemble_keyphrases(const std::vector<ScoredTerm>& ranked,
                                           const std::vector<std::vector<AnalyzedToken>>& texts,
                                           const KeyphraseOptions& options = {});

// ---- concepts -------------------------------------------------------------------

enum class DeliveryStyle { kWhiteboardAnnotation, kSlideBased, kDirectLecture };

std::string_view to_string(DeliveryStyle s);

struct Mention {
  std::int64_t t_ms = 0;
  // Exactly one of the two is set.
  std::optional<std::size_t> cue_index;
  std::optional<std::string> element_id;
  Interval interval;  // the cue's interval or the element's t_range

  friend bool operator==(const Mention&, const Mention&) = default;
};

struct Concept {
  std::string id;
  std::string label;
  std::vector<Mention> mentions;  // by time, cues before elements at equal times
  std::vector<Interval> spans;    // merged mention intervals (gap rule applied)
  std::int64_t duration_ms = 0;
  DeliveryStyle delivery_style = DeliveryStyle::kSlideBased;
  double importance = 0;
  double textrank_score = 0;

  std::int64_t first_mention_ms() const { return mentions.empty() ? 0 : mentions.front().t_ms; }
};

struct LinkResult {
  std::vector<Concept> concepts;       // ids "c-01", ... by first mention, then label
  std::vector<std::string> warnings;   // labels without any mention
};

// Finds every cue and every non-Subtitle element whose lemma sequence
// contains the label's lemma sequence contiguously, and back-fills
// concept_ids on all elements containing it (Subtitle elements included).
LinkResult link_mentions(const std::vector<Keyphrase>& labels, const ingest::Transcript& transcript,
                         std::vector<elements::Element>& elements, const TextAnalyzer& analyzer = {});

// Merged cue intervals of the concept's cue mentions (element intervals when
// it has no cue mention), intervals closer than gap_ms fused.
std::vector<Interval> mention_spans(const Concept& c, std::int64_t gap_ms = 5000);

std::int64_t compute_duration(const Concept& c, std::int64_t gap_ms = 5000);

struct SegmentEvidence {
  bool handwritten_text = false;
  bool teacher_head = false;
  bool slide_present = false;
  friend bool operator==(const SegmentEvidence&, const SegmentEvidence&) = default;
};

// One record per segment: handwriting and teacher flags from the element
// pass; slide_present when the segment holds a basic element that is not
// handwritten.
std::vector<SegmentEvidence> delivery_evidence(const elements::ElementSet& set, std::size_t segment_count);

// The flag combination with the largest total overlap between the spans and
// the segments carrying it decides the style (ties: earliest segment).
DeliveryStyle classify_delivery(const std::vector<Interval>& spans, const std::vector<slideseg::SlideSegment>& segments,
                                const std::vector<SegmentEvidence>& evidence);

struct ImportanceWeights {
  double duration = 1.0;
  double association = 1.0;
  double inclusion = 1.5;
  double similarity = 0.5;
};

struct GraphDegrees {
  std::size_t association = 0;
  std::size_t inclusion = 0;
  std::size_t similarity = 0;
};

double raw_importance(std::int64_t duration_ms, const GraphDegrees& degrees, const ImportanceWeights& w = {});

// Min-max normalization; a course whose raw scores are all equal gets 1.0.
std::vector<double> normalize_importance(const std::vector<double>& raw);

// Index of the highest-importance concept whose spans cover t (ties: lower
// index), or nullopt.
std::optional<std::size_t> active_concept(const std::vector<Concept>& concepts, std::int64_t t_ms);

Json to_json(const Concept& c);

}  // namespace moocaug::concepts

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "moocaug/common/canonical_json.hpp"
#include "moocaug/common/error.hpp"
#include "moocaug/common/text.hpp"
#include "moocaug/concepts/concepts.hpp"
#include "moocaug/ingest/transcript.hpp"
#include "moocaug/slideseg/segmentation.hpp"

namespace moocaug::structure {

enum class StructureErrc { kEmptyCorpus, kInvalidTopicCount, kEmptyDocument, kInconsistentCounts };

using StructureError = CodedError<StructureErrc>;

// ---- Topics over Time -------------------------------------------------------------

struct TotDocument {
  std::vector<std::string> words;
  double timestamp = 0.5;  // normalized course time
  std::int64_t t_ms = 0;
};

struct TotOptions {
  std::size_t topics = 2;
  std::size_t iterations = 500;
  std::optional<double> alpha;  // default 50 / K
  double beta = 0.01;
  std::uint64_t seed = 1;
  double variance_floor = 1e-4;
  double epsilon = 1e-3;         // timestamps clamped to [eps, 1 - eps]
  bool verify_counts = false;    // recount caches after every sweep
};

struct BetaShape {
  double a = 1;
  double b = 1;
  friend bool operator==(const BetaShape&, const BetaShape&) = default;
};

struct TotModel {
  std::size_t K = 0;
  std::vector<std::string> vocabulary;               // sorted
  std::vector<std::vector<double>> phi;              // K x V
  std::vector<std::vector<double>> theta;            // D x K
  std::vector<BetaShape> psi;                        // K
  std::vector<std::vector<std::size_t>> assignments;  // per document, per token
  double alpha = 0;
  double beta = 0;

  friend bool operator==(const TotModel&, const TotModel&) = default;
};

// Mode of Beta(a, b); the mean when the density has no interior mode.
double beta_mode(const BetaShape& s);

// Method-of-moments fit. Fewer than two samples or zero variance give
// Beta(1, 1); otherwise the variance is floored before solving.
BetaShape fit_beta_moments(const std::vector<double>& samples, double variance_floor = 1e-4);

// Collapsed Gibbs sampling. Throws kEmptyCorpus, kInvalidTopicCount (K < 1)
// and kEmptyDocument.
TotModel tot_fit(const std::vector<TotDocument>& docs, const TotOptions& options = {});

// Bags of content lemmas over consecutive groups of `window_cues` cues,
// stamped with the window midpoint. Empty windows are skipped.
std::vector<TotDocument> cue_window_documents(const ingest::Transcript& transcript, std::size_t window_cues,
                                              std::int64_t duration_ms, const TextAnalyzer& analyzer = {});

// K = segment count clamped to [2, 10].
std::size_t default_topic_count(std::size_t segment_count);

// Top words per topic, psi, and each segment's dominant topic by token count.
Json topic_report(const TotModel& model, const std::vector<TotDocument>& docs,
                  const std::vector<slideseg::SlideSegment>& segments, std::size_t top_words = 8);

// ---- progress bar ---------------------------------------------------------------

struct CurveSample {
  std::int64_t t_ms = 0;
  double value = 0;
  friend bool operator==(const CurveSample&, const CurveSample&) = default;
};

struct ImportanceCurve {
  std::vector<CurveSample> samples;
};

// Samples at 0, stride, 2*stride, ... below duration; value(t) is the max
// importance over concepts whose spans cover t.
ImportanceCurve importance_curve(const std::vector<concepts::Concept>& concepts, std::int64_t duration_ms,
                                 std::int64_t stride_ms = 1000);

struct TimeNodeOptions {
  double quantile = 0.7;
  std::int64_t min_gap_ms = 15000;
};

// Linear-interpolation quantile of the values.
double quantile(std::vector<double> values, double q);

// Strict local maxima (a plateau counts once, at its middle sample) whose
// value reaches the quantile threshold, thinned greedily by value so that
// nodes stay min_gap apart (ties: earlier). Returned in time order.
std::vector<std::int64_t> key_time_nodes(const ImportanceCurve& curve, const TimeNodeOptions& options = {});

// ---- overview ---------------------------------------------------------------------

struct OverviewGroup {
  concepts::DeliveryStyle style = concepts::DeliveryStyle::kSlideBased;
  std::vector<std::size_t> concepts;  // indices, chronological
  std::optional<std::size_t> topic;   // dominant TOT topic of the group
  std::string topic_label;            // its top words
};

// One group per delivery style present, ordered by the style's earliest
// first mention.
std::vector<OverviewGroup> partition_overview(const std::vector<concepts::Concept>& concepts);

// Tags each group with the topic whose word distribution gives the group's
// label lemmas the most mass.
void label_groups(std::vector<OverviewGroup>& groups, const std::vector<concepts::Concept>& concepts,
                  const TotModel& model, std::size_t label_words = 3);

}  // namespace moocaug::structure

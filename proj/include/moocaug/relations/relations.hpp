#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "moocaug/common/canonical_json.hpp"
#include "moocaug/common/error.hpp"
#include "moocaug/common/json_transport.hpp"
#include "moocaug/common/text.hpp"
#include "moocaug/concepts/concepts.hpp"
#include "moocaug/elements/elements.hpp"
#include "moocaug/ingest/transcript.hpp"
#include "moocaug/slideseg/segmentation.hpp"

namespace moocaug::relations {

enum class RelationsErrc {
  kClientUnreachable,
  kAllRetriesMalformed,
  kInvalidTemplate,
  kInvariantViolation,
};

using RelationsError = CodedError<RelationsErrc>;

enum class RelationKind { kAssociation, kInclusion, kSimilarity };

inline constexpr std::array<RelationKind, 3> kAllRelationKinds = {
    RelationKind::kAssociation, RelationKind::kInclusion, RelationKind::kSimilarity};

std::string_view to_string(RelationKind k);
std::optional<RelationKind> parse_relation_kind(std::string_view name);  // case-insensitive

constexpr bool is_symmetric(RelationKind k) { return k != RelationKind::kInclusion; }

enum class EvidenceSource { kRule, kLlm };

struct Evidence {
  EvidenceSource source = EvidenceSource::kRule;
  std::string detail;
  friend bool operator==(const Evidence&, const Evidence&) = default;
};

// Inclusion reads src ⊃ dst. Symmetric kinds are stored with src < dst.
struct Relationship {
  std::string src;
  std::string dst;
  RelationKind kind = RelationKind::kAssociation;
  double weight = 1.0;
  std::vector<Evidence> evidence;
  friend bool operator==(const Relationship&, const Relationship&) = default;
};

Json to_json(const Relationship& r);

// ---- rules ---------------------------------------------------------------------

struct RuleOptions {
  std::size_t window_cues = 4;  // consecutive cues per co-occurrence window
  double tau_pmi = 0.5;
  double tau_sim = 0.6;
  double heading_max_y = 0.3;  // a heading block starts above this line
  std::size_t max_concurrency = 4;
};

// Natural-log PMI from window counts; -inf when the pair never co-occurs.
double pmi(std::size_t windows, std::size_t with_a, std::size_t with_b, std::size_t with_both);

// PMI divided by -ln p(a,b), in [-1, 1].
double npmi(std::size_t windows, std::size_t with_a, std::size_t with_b, std::size_t with_both);

// Window w holds cues [w*width, (w+1)*width).
std::vector<std::vector<std::size_t>> concept_windows(const std::vector<concepts::Concept>& concepts,
                                                       std::size_t cue_count, std::size_t width);

// Association (NPMI weight), Inclusion by label subsequence or heading
// nesting (weight 1), Similarity (cosine weight). Output sorted by
// (kind, src, dst).
std::vector<Relationship> rule_relations(const std::vector<concepts::Concept>& concepts,
                                         const ingest::Transcript& transcript,
                                         const std::vector<elements::Element>& elements,
                                         const std::vector<slideseg::SlideSegment>& segments,
                                         const RuleOptions& options = {}, const TextAnalyzer& analyzer = {});

// ---- LLM enrichment ------------------------------------------------------------

struct TranscriptChunk {
  std::size_t first_cue = 0;
  std::size_t last_cue = 0;  // inclusive
  std::string text;          // cue texts joined by newlines
};

// Greedy chunks of whole cues whose word count stays within the budget;
// each chunk after the first repeats the previous chunk's last cue. A cue
// longer than the budget forms a chunk alone.
std::vector<TranscriptChunk> chunk_transcript(const ingest::Transcript& transcript, std::size_t token_budget);

class PromptTemplate {
 public:
  // Throws kInvalidTemplate when a required field is missing.
  static PromptTemplate parse(std::string_view json_text);
  static PromptTemplate builtin();

  int version() const { return version_; }
  std::string render(const std::vector<std::string>& concept_labels, std::string_view transcript) const;

 private:
  int version_ = 0;
  std::string system_, definitions_, instruction_, layout_;
  std::vector<Json> few_shot_;
};

struct LlmOptions {
  std::string path = "/complete";
  std::size_t token_budget = 1500;
  int max_tokens = 1024;
  int retries = 2;
  double llm_weight = 0.6;
  std::size_t max_concurrency = 4;
};

struct DroppedProposal {
  std::size_t chunk = 0;
  std::size_t entry = 0;
  std::string reason;
};

struct LlmResult {
  std::vector<Relationship> proposals;  // distinct (src, dst, kind), sorted
  std::vector<DroppedProposal> dropped;
  std::vector<std::size_t> skipped_chunks;  // every attempt malformed
  std::size_t requests = 0;
};

// Extracts the relationship array from a model reply. Tolerates prose or a
// code fence around the array. Throws kAllRetriesMalformed when no JSON
// array can be read.
Json parse_reply_array(std::string_view text);

// One request per chunk. Entries naming unknown labels or kinds, self-loops
// and entries with bad fields are dropped; a malformed reply is retried up
// to `retries` times, then the chunk is skipped. Throws kClientUnreachable
// when the service cannot be reached.
LlmResult llm_enrich(JsonTransport& client, const std::vector<TranscriptChunk>& chunks,
                     const std::vector<concepts::Concept>& concepts, const PromptTemplate& prompt,
                     const LlmOptions& options = {}, const TextAnalyzer& analyzer = {});

// ---- graph ---------------------------------------------------------------------

struct ConceptGraph {
  std::vector<std::string> concept_ids;
  std::vector<Relationship> relationships;  // sorted (kind, src, dst)
  std::vector<Relationship> removed;        // inclusion edges cut to break cycles, in removal order
  std::vector<std::string> warnings;        // rejected input entries
  // adjacency[kind][i]: neighbor indices of concept i. Symmetric kinds list
  // both directions; Inclusion lists the included concepts.
  std::array<std::vector<std::vector<std::size_t>>, 3> adjacency;

  std::optional<std::size_t> index_of(std::string_view id) const;
  // Symmetric kinds answer for either orientation.
  std::optional<double> weight(std::string_view src, std::string_view dst, RelationKind kind) const;
  // Edges of the kind touching concept i, either direction.
  std::size_t degree(std::size_t i, RelationKind kind) const;
  concepts::GraphDegrees degrees(std::size_t i) const;
  // Kahn order of the inclusion subgraph, or nullopt on a cycle.
  std::optional<std::vector<std::size_t>> inclusion_order() const;
};

// Drops invalid entries (unknown ids, self-loops, weight outside (0, 1]),
// merges duplicates by noisy-or, then cuts inclusion cycles by removing the
// lightest edge lying on any cycle (ties: lexicographic (src, dst)).
ConceptGraph merge_validate(const std::vector<std::string>& concept_ids, const std::vector<Relationship>& rule_rels,
                            const std::vector<Relationship>& llm_rels);

Json to_json(const ConceptGraph& g);

}  // namespace moocaug::relations

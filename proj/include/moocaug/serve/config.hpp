#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "moocaug/common/error.hpp"
#include "moocaug/concepts/concepts.hpp"
#include "moocaug/elements/elements.hpp"
#include "moocaug/ingest/frames.hpp"
#include "moocaug/layout/layout.hpp"
#include "moocaug/manifest/state_machine.hpp"
#include "moocaug/relations/relations.hpp"
#include "moocaug/slideseg/segmentation.hpp"
#include "moocaug/structure/structure.hpp"

namespace moocaug::serve {

enum class ConfigErrc { kSyntax, kUnknownKey, kBadValue, kOutOfRange, kMissingKey };

using ConfigError = CodedError<ConfigErrc>;

inline constexpr std::string_view kDetectorUrlEnv = "MOOCAUG_DETECTOR_URL";
inline constexpr std::string_view kLlmUrlEnv = "MOOCAUG_LLM_URL";

struct BuildConfig {
  std::filesystem::path base_dir;  // relative paths resolve against this
  std::string course_id;
  std::optional<std::int64_t> duration_ms;  // default: end of transcript or frames, whichever is later
  std::uint64_t seed = 1;
  std::size_t max_concurrency = 4;

  std::filesystem::path subtitles;
  std::filesystem::path frames;       // image directory or histogram cache
  std::filesystem::path annotations;  // empty: none
  std::filesystem::path output;
  // Shell command producing the frame directory; "{out}" expands to the
  // directory to fill and "{tools}" to the directory of the running binary.
  std::string frames_extractor;

  std::filesystem::path stopwords, lemmas, test_lexicon, example_lexicon, prompt_template;

  std::optional<std::string> detector_url;
  bool detector_required = false;
  std::optional<std::string> llm_url;

  ingest::FrameLoadOptions frame_options;
  slideseg::SegmentationOptions segmentation;
  elements::ClientOptions detector;
  elements::ElementOptions element_options;
  concepts::TextRankOptions textrank;
  concepts::KeyphraseOptions keyphrases;
  std::int64_t gap_ms = 5000;
  concepts::ImportanceWeights importance;
  relations::RuleOptions rules;
  relations::LlmOptions llm;

  std::size_t topics = 0;  // 0: derived from the segment count
  std::size_t tot_iterations = 500;
  std::optional<double> tot_alpha;
  double tot_beta = 0.01;
  std::size_t tot_window_cues = 2;
  std::size_t topic_label_words = 3;
  std::int64_t curve_stride_ms = 1000;
  structure::TimeNodeOptions time_nodes;

  layout::LayoutOptions layout;
  manifest::InteractionConfig interaction;
};

// Keys and the range each accepts, for docs and error messages.
struct KeySpec {
  std::string key;
  std::string range;
  std::string fallback;
};

const std::vector<KeySpec>& config_keys();

// INI syntax: "[section]" headers, "key = value" lines, ';' or '#' comment
// lines. Keys are addressed as "section.key". Unknown keys, malformed values
// and values outside their documented range are rejected.
BuildConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);

// Reads the file, resolves paths against its directory and applies the
// environment overrides for client endpoints.
BuildConfig load_config(const std::filesystem::path& path);

// "section.key=value" overrides, applied after the file.
void apply_override(BuildConfig& config, std::string_view assignment);

// Environment overrides: MOOCAUG_DETECTOR_URL, MOOCAUG_LLM_URL. An empty
// variable disables the client.
void apply_environment(BuildConfig& config);

// Missing required keys.
void check_complete(const BuildConfig& config);

}  // namespace moocaug::serve

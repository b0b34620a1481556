#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "moocaug/common/interval.hpp"
#include "moocaug/common/text.hpp"

namespace moocaug::ingest {

struct Cue {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  std::string text;
  std::vector<WordToken> token_spans;

  Interval interval() const { return {start_ms, end_ms}; }
  friend bool operator==(const Cue&, const Cue&) = default;
};

// Invariants: cues sorted by start_ms, start_ms < end_ms, text non-blank.
// Overlaps never survive parsing, so the cues partition their covered time.
struct Transcript {
  std::vector<Cue> cues;

  std::int64_t end_ms() const { return cues.empty() ? 0 : cues.back().end_ms; }
  friend bool operator==(const Transcript&, const Transcript&) = default;
};

enum class SubtitleFormat { kSrt, kWebVtt };

std::string_view to_string(SubtitleFormat f);

struct CueRejection {
  std::size_t line = 0;  // 1-based line of the offending timing line or block
  std::string reason;
};

struct SubtitleParseResult {
  Transcript transcript;
  std::vector<CueRejection> rejected;
};

// Parses SRT or WebVTT bytes. A UTF-8 BOM is stripped; CRLF and CR line ends
// are accepted. Malformed cues are skipped and listed in `rejected`.
// Throws IngestError: kEmptyFile when the input holds no cue at all,
// kMalformedTimestamp when cues exist but none parses, kUnknownFormat for a
// WebVTT input without the WEBVTT signature, kInvalidEncoding for bad UTF-8.
SubtitleParseResult parse_subtitles(std::string_view bytes, SubtitleFormat format);

// Format from the file extension (.srt/.vtt), then from content sniffing.
// Throws kUnknownFormat when neither identifies the input.
SubtitleFormat detect_subtitle_format(std::string_view bytes, std::string_view filename = {});

SubtitleFormat parse_subtitle_format_name(std::string_view name);

// Timestamp grammars. SRT: H+:MM:SS,mmm ('.' accepted in place of ',').
// WebVTT: [H{2,}:]MM:SS.mmm. Minutes and seconds must be < 60.
std::optional<std::int64_t> parse_srt_timestamp(std::string_view s);
std::optional<std::int64_t> parse_vtt_timestamp(std::string_view s);
std::string format_srt_timestamp(std::int64_t ms);

std::string to_srt(const Transcript& transcript);

// Rebuilds token spans from cue text.
void retokenize(Cue& cue);

}  // namespace moocaug::ingest

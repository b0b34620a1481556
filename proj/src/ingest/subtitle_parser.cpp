#include <algorithm>
#include <cstdio>

#include "moocaug/ingest/errors.hpp"
#include "moocaug/ingest/transcript.hpp"

namespace moocaug::ingest {
namespace {

struct Line {
  std::string text;
  std::size_t number;  // 1-based
};

using Block = std::vector<Line>;

std::vector<Line> split_lines(std::string_view data) {
  std::vector<Line> lines;
  std::size_t number = 1;
  std::size_t i = 0;
  while (i <= data.size()) {
    std::size_t j = i;
    while (j < data.size() && data[j] != '\n' && data[j] != '\r') ++j;
    lines.push_back({std::string(data.substr(i, j - i)), number++});
    if (j >= data.size()) break;
    if (data[j] == '\r' && j + 1 < data.size() && data[j + 1] == '\n') ++j;
    i = j + 1;
  }
  return lines;
}

bool is_blank(const std::string& s) {
  return s.find_first_not_of(" \t\f\v") == std::string::npos;
}

std::vector<Block> split_blocks(const std::vector<Line>& lines) {
  std::vector<Block> blocks;
  Block current;
  for (const auto& line : lines) {
    if (is_blank(line.text)) {
      if (!current.empty()) blocks.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(line);
    }
  }
  if (!current.empty()) blocks.push_back(std::move(current));
  return blocks;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::optional<std::int64_t> to_int(std::string_view s) {
  if (!all_digits(s) || s.size() > 12) return std::nullopt;
  std::int64_t v = 0;
  for (const char c : s) v = v * 10 + (c - '0');
  return v;
}

// Splits "a:b:c" on ':' into parts.
std::vector<std::string_view> split_colon(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  for (;;) {
    const auto j = s.find(':', i);
    parts.push_back(s.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i));
    if (j == std::string_view::npos) break;
    i = j + 1;
  }
  return parts;
}

std::optional<std::int64_t> compose(std::int64_t h, std::int64_t m, std::int64_t s,
                                    std::int64_t ms) {
  if (m > 59 || s > 59) return std::nullopt;
  return ((h * 60 + m) * 60 + s) * 1000 + ms;
}

bool starts_with_keyword(const std::string& line, std::string_view kw) {
  if (line.compare(0, kw.size(), kw) != 0) return false;
  return line.size() == kw.size() || line[kw.size()] == ' ' || line[kw.size()] == '\t';
}

std::string strip_markup(std::string_view line, bool decode_entities) {
  std::string out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == '<' && i + 1 < line.size()) {
      const char n = line[i + 1];
      const bool tagish = (n >= 'a' && n <= 'z') || (n >= 'A' && n <= 'Z') ||
                          (n >= '0' && n <= '9') || n == '/' || n == '.';
      const auto close = line.find('>', i);
      if (tagish && close != std::string_view::npos) {
        i = close + 1;
        continue;
      }
    }
    if (c == '{' && i + 1 < line.size() && line[i + 1] == '\\') {
      const auto close = line.find('}', i);
      if (close != std::string_view::npos) {
        i = close + 1;
        continue;
      }
    }
    if (c == '&' && decode_entities) {
      static constexpr std::pair<std::string_view, std::string_view> kEntities[] = {
          {"&amp;", "&"}, {"&lt;", "<"}, {"&gt;", ">"},
          {"&nbsp;", " "}, {"&lrm;", ""}, {"&rlm;", ""},
      };
      bool matched = false;
      for (const auto& [name, value] : kEntities) {
        if (line.substr(i, name.size()) == name) {
          out += value;
          i += name.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    out += c;
    ++i;
  }
  return out;
}

void parse_cue_block(const Block& block, std::size_t first, bool webvtt, std::vector<Cue>& cues,
                     std::vector<CueRejection>& rejected) {
  std::size_t timing = block.size();
  for (std::size_t k = first; k < std::min(block.size(), first + 2); ++k) {
    if (block[k].text.find("-->") != std::string::npos) {
      timing = k;
      break;
    }
  }
  if (timing == block.size()) {
    rejected.push_back({block[first].number, "missing timing line"});
    return;
  }
  const auto& line = block[timing];
  const auto arrow = line.text.find("-->");
  const auto left = trim(std::string_view(line.text).substr(0, arrow));
  auto right = trim(std::string_view(line.text).substr(arrow + 3));
  if (const auto ws = right.find_first_of(" \t"); ws != std::string::npos) right.resize(ws);

  const auto parse = webvtt ? parse_vtt_timestamp : parse_srt_timestamp;
  const auto start = parse(left);
  if (!start) {
    rejected.push_back({line.number, "malformed start timestamp '" + left + "'"});
    return;
  }
  const auto end = parse(right);
  if (!end) {
    rejected.push_back({line.number, "malformed end timestamp '" + right + "'"});
    return;
  }
  if (*end <= *start) {
    rejected.push_back({line.number, "end not after start"});
    return;
  }

  std::string text;
  for (std::size_t k = timing + 1; k < block.size(); ++k) {
    const auto cleaned = trim(strip_markup(block[k].text, webvtt));
    if (cleaned.empty()) continue;
    if (!text.empty()) text += '\n';
    text += cleaned;
  }
  if (text.empty()) {
    rejected.push_back({line.number, "empty cue text"});
    return;
  }
  cues.push_back({*start, *end, std::move(text), {}});
}

Transcript normalize(std::vector<Cue> cues) {
  std::stable_sort(cues.begin(), cues.end(),
                   [](const Cue& a, const Cue& b) { return a.start_ms < b.start_ms; });
  std::vector<Cue> out;
  for (auto& cue : cues) {
    if (!out.empty() && out.back().start_ms == cue.start_ms) {
      // Same start: fold into one cue so the truncation below cannot empty it.
      auto& prev = out.back();
      prev.end_ms = std::max(prev.end_ms, cue.end_ms);
      prev.text += '\n';
      prev.text += cue.text;
      continue;
    }
    out.push_back(std::move(cue));
  }
  for (std::size_t i = 0; i + 1 < out.size(); ++i) {
    if (out[i].end_ms > out[i + 1].start_ms) out[i].end_ms = out[i + 1].start_ms;
  }
  for (auto& cue : out) retokenize(cue);
  return Transcript{std::move(out)};
}

}  // namespace

std::string_view to_string(SubtitleFormat f) {
  return f == SubtitleFormat::kSrt ? "srt" : "webvtt";
}

std::optional<std::int64_t> parse_srt_timestamp(std::string_view s) {
  auto sep = s.find(',');
  if (sep == std::string_view::npos) sep = s.rfind('.');
  if (sep == std::string_view::npos) return std::nullopt;
  const auto frac = s.substr(sep + 1);
  if (frac.size() != 3) return std::nullopt;
  const auto parts = split_colon(s.substr(0, sep));
  if (parts.size() != 3 || parts[1].size() != 2 || parts[2].size() != 2) return std::nullopt;
  const auto h = to_int(parts[0]);
  const auto m = to_int(parts[1]);
  const auto sec = to_int(parts[2]);
  const auto ms = to_int(frac);
  if (!h || !m || !sec || !ms) return std::nullopt;
  return compose(*h, *m, *sec, *ms);
}

std::optional<std::int64_t> parse_vtt_timestamp(std::string_view s) {
  const auto dot = s.find('.');
  if (dot == std::string_view::npos) return std::nullopt;
  const auto frac = s.substr(dot + 1);
  if (frac.size() != 3) return std::nullopt;
  const auto parts = split_colon(s.substr(0, dot));
  std::optional<std::int64_t> h = 0;
  std::size_t base = 0;
  if (parts.size() == 3) {
    if (parts[0].size() < 2) return std::nullopt;
    h = to_int(parts[0]);
    base = 1;
  } else if (parts.size() != 2) {
    return std::nullopt;
  }
  if (parts[base].size() != 2 || parts[base + 1].size() != 2) return std::nullopt;
  const auto m = to_int(parts[base]);
  const auto sec = to_int(parts[base + 1]);
  const auto ms = to_int(frac);
  if (!h || !m || !sec || !ms) return std::nullopt;
  return compose(*h, *m, *sec, *ms);
}

std::string format_srt_timestamp(std::int64_t ms) {
  const auto h = ms / 3600000;
  const auto m = (ms / 60000) % 60;
  const auto s = (ms / 1000) % 60;
  const auto f = ms % 1000;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld,%03lld", static_cast<long long>(h),
                static_cast<long long>(m), static_cast<long long>(s), static_cast<long long>(f));
  return buf;
}

void retokenize(Cue& cue) { cue.token_spans = tokenize_words(cue.text); }

SubtitleParseResult parse_subtitles(std::string_view bytes, SubtitleFormat format) {
  if (bytes.substr(0, 3) == "\xEF\xBB\xBF") bytes.remove_prefix(3);
  if (!is_valid_utf8(bytes)) {
    throw IngestError(IngestErrc::kInvalidEncoding, "subtitle input is not valid UTF-8");
  }
  const auto blocks = split_blocks(split_lines(bytes));
  const bool webvtt = format == SubtitleFormat::kWebVtt;

  std::vector<Cue> cues;
  std::vector<CueRejection> rejected;
  std::size_t first_block = 0;
  if (webvtt) {
    if (blocks.empty()) throw IngestError(IngestErrc::kEmptyFile, "empty subtitle file");
    if (!starts_with_keyword(blocks[0][0].text, "WEBVTT")) {
      throw IngestError(IngestErrc::kUnknownFormat, "missing WEBVTT signature", 1);
    }
    first_block = 1;
  }
  for (std::size_t b = first_block; b < blocks.size(); ++b) {
    const auto& block = blocks[b];
    if (webvtt && (starts_with_keyword(block[0].text, "NOTE") ||
                   starts_with_keyword(block[0].text, "STYLE") ||
                   starts_with_keyword(block[0].text, "REGION"))) {
      continue;
    }
    parse_cue_block(block, 0, webvtt, cues, rejected);
  }

  if (cues.empty()) {
    if (rejected.empty()) throw IngestError(IngestErrc::kEmptyFile, "no cues in subtitle file");
    throw IngestError(IngestErrc::kMalformedTimestamp,
                      "no parseable cue; first problem at line " +
                          std::to_string(rejected.front().line) + ": " + rejected.front().reason,
                      rejected.front().line);
  }
  return {normalize(std::move(cues)), std::move(rejected)};
}

SubtitleFormat detect_subtitle_format(std::string_view bytes, std::string_view filename) {
  const auto lowered = ascii_lower(filename);
  auto has_suffix = [&](std::string_view suf) {
    return lowered.size() >= suf.size() && lowered.substr(lowered.size() - suf.size()) == suf;
  };
  if (has_suffix(".srt")) return SubtitleFormat::kSrt;
  if (has_suffix(".vtt")) return SubtitleFormat::kWebVtt;
  if (bytes.substr(0, 3) == "\xEF\xBB\xBF") bytes.remove_prefix(3);
  if (bytes.substr(0, 6) == "WEBVTT") return SubtitleFormat::kWebVtt;
  const auto lines = split_lines(bytes.substr(0, 4096));
  for (const auto& line : lines) {
    if (line.text.find("-->") != std::string::npos) {
      const auto arrow = line.text.find("-->");
      if (parse_srt_timestamp(trim(line.text.substr(0, arrow)))) return SubtitleFormat::kSrt;
    }
  }
  throw IngestError(IngestErrc::kUnknownFormat,
                    "cannot identify subtitle format of '" + std::string(filename) + "'");
}

SubtitleFormat parse_subtitle_format_name(std::string_view name) {
  const auto lowered = ascii_lower(name);
  if (lowered == "srt" || lowered == "subrip") return SubtitleFormat::kSrt;
  if (lowered == "vtt" || lowered == "webvtt") return SubtitleFormat::kWebVtt;
  throw IngestError(IngestErrc::kUnknownFormat, "unknown subtitle format '" + std::string(name) + "'");
}

std::string to_srt(const Transcript& transcript) {
  std::string out;
  for (std::size_t i = 0; i < transcript.cues.size(); ++i) {
    const auto& cue = transcript.cues[i];
    out += std::to_string(i + 1);
    out += '\n';
    out += format_srt_timestamp(cue.start_ms);
    out += " --> ";
    out += format_srt_timestamp(cue.end_ms);
    out += '\n';
    out += cue.text;
    out += "\n\n";
  }
  return out;
}

}  // namespace moocaug::ingest

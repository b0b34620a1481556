#include "moocaug/common/text.hpp"

#include <fstream>
#include <sstream>

#include "moocaug/common/error.hpp"

namespace moocaug {
namespace {

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         c >= 0x80;
}

bool is_alnum_byte(unsigned char c) { return is_word_byte(c) && c < 0x80; }

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::unordered_map<std::string, std::string> parse_exceptions(std::string_view content) {
  std::unordered_map<std::string, std::string> out;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto tab = t.find_first_of("\t ");
    if (tab == std::string::npos) continue;
    out[ascii_lower(trim(t.substr(0, tab)))] = ascii_lower(trim(t.substr(tab + 1)));
  }
  return out;
}

}  // namespace

std::vector<WordToken> tokenize_words(std::string_view text) {
  std::vector<WordToken> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (!is_word_byte(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    while (i < n) {
      const auto c = static_cast<unsigned char>(text[i]);
      if (is_word_byte(c)) {
        ++i;
      } else if (c == '\'' && i + 1 < n && i > begin &&
                 is_word_byte(static_cast<unsigned char>(text[i + 1]))) {
        ++i;
      } else {
        break;
      }
    }
    out.push_back({ascii_lower(text.substr(begin, i - begin)), {begin, i}});
  }
  return out;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

bool is_valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range code points.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += len;
  }
  return true;
}

std::vector<std::string> parse_word_list(std::string_view content) {
  std::vector<std::string> out;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.push_back(ascii_lower(t));
  }
  return out;
}

std::vector<std::string> read_word_list(const std::filesystem::path& path) {
  return parse_word_list(read_file(path));
}

StopwordList::StopwordList() : StopwordList(parse_word_list(defaults::stopwords_en())) {}

StopwordList::StopwordList(const std::vector<std::string>& words)
    : words_(words.begin(), words.end()) {}

StopwordList StopwordList::from_file(const std::filesystem::path& path) {
  return StopwordList(read_word_list(path));
}

bool StopwordList::contains(std::string_view lowered) const {
  return words_.count(std::string(lowered)) > 0;
}

Lemmatizer::Lemmatizer() : exceptions_(parse_exceptions(defaults::lemma_exceptions_en())) {}

Lemmatizer::Lemmatizer(std::unordered_map<std::string, std::string> exceptions)
    : exceptions_(std::move(exceptions)) {}

Lemmatizer Lemmatizer::from_file(const std::filesystem::path& path) {
  return Lemmatizer(parse_exceptions(read_file(path)));
}

std::string Lemmatizer::lemma(std::string_view lowered) const {
  std::string w(lowered);
  if (ends_with(w, "'s")) w.resize(w.size() - 2);
  if (!w.empty() && w.back() == '\'') w.pop_back();
  if (const auto it = exceptions_.find(w); it != exceptions_.end()) return it->second;
  const auto n = w.size();
  if (n > 4 && ends_with(w, "ies")) return w.substr(0, n - 3) + "y";
  if (n > 4 && ends_with(w, "sses")) return w.substr(0, n - 2);
  if (n > 4 && (ends_with(w, "ches") || ends_with(w, "shes") || ends_with(w, "xes"))) {
    return w.substr(0, n - 2);
  }
  if (n > 3 && w.back() == 's' && !ends_with(w, "ss") && !ends_with(w, "us") &&
      !ends_with(w, "is")) {
    return w.substr(0, n - 1);
  }
  return w;
}

std::vector<AnalyzedToken> TextAnalyzer::analyze(std::string_view text) const {
  std::vector<AnalyzedToken> out;
  std::size_t prev_end = 0;
  for (auto& word : tokenize_words(text)) {
    AnalyzedToken tok;
    tok.range = word.range;
    tok.clause_start = out.empty() || text.substr(prev_end, word.range.begin - prev_end).find_first_not_of(" \t\r\n-'") !=
                                          std::string_view::npos;
    prev_end = word.range.end;
    const bool numeric = word.text.find_first_not_of("0123456789") == std::string::npos;
    const bool stop = stopwords_.contains(word.text);
    tok.lemma = lemmatizer_.lemma(word.text);
    tok.content = !stop && !numeric && tok.lemma.size() >= 2 && !stopwords_.contains(tok.lemma);
    out.push_back(std::move(tok));
  }
  return out;
}

std::string TextAnalyzer::canonical(std::string_view text) const {
  std::string out;
  for (const auto& tok : analyze(text)) {
    if (!out.empty()) out += ' ';
    out += tok.lemma;
  }
  return out;
}

std::vector<std::string> split_words(std::string_view phrase) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < phrase.size()) {
    const auto j = phrase.find(' ', i);
    const auto end = j == std::string_view::npos ? phrase.size() : j;
    if (end > i) out.emplace_back(phrase.substr(i, end - i));
    i = end + 1;
  }
  return out;
}

bool contains_at_word_boundary(std::string_view lowered_text, std::string_view entry) {
  if (entry.empty()) return false;
  std::size_t pos = lowered_text.find(entry);
  while (pos != std::string_view::npos) {
    const bool left_ok =
        pos == 0 || !is_alnum_byte(static_cast<unsigned char>(lowered_text[pos - 1])) ||
        !is_alnum_byte(static_cast<unsigned char>(entry.front()));
    const auto after = pos + entry.size();
    const bool right_ok =
        after >= lowered_text.size() ||
        !is_alnum_byte(static_cast<unsigned char>(lowered_text[after])) ||
        !is_alnum_byte(static_cast<unsigned char>(entry.back()));
    if (left_ok && right_ok) return true;
    pos = lowered_text.find(entry, pos + 1);
  }
  return false;
}

}  // namespace moocaug

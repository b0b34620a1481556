#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace moocaug {

// Byte range [begin, end) into a UTF-8 string.
struct CharRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const CharRange&, const CharRange&) = default;
};

struct WordToken {
  std::string text;  // ASCII-lowercased surface form
  CharRange range;
  friend bool operator==(const WordToken&, const WordToken&) = default;
};

// Splits text into words. A word is a maximal run of ASCII alphanumerics and
// non-ASCII UTF-8 bytes; an apostrophe between two word characters stays
// inside the word.
std::vector<WordToken> tokenize_words(std::string_view text);

std::string ascii_lower(std::string_view s);
std::string trim(std::string_view s);
bool is_valid_utf8(std::string_view s);

// Reads a newline-separated word list. Blank lines and lines starting with
// '#' are skipped; entries are lowercased and trimmed.
std::vector<std::string> parse_word_list(std::string_view content);
std::vector<std::string> read_word_list(const std::filesystem::path& path);

class StopwordList {
 public:
  StopwordList();  // shipped English defaults
  explicit StopwordList(const std::vector<std::string>& words);
  static StopwordList from_file(const std::filesystem::path& path);

  bool contains(std::string_view lowered) const;
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

// Rule-based English noun lemmatizer: an exception table first, then
// plural/possessive suffix rules.
class Lemmatizer {
 public:
  Lemmatizer();  // shipped exception table
  explicit Lemmatizer(std::unordered_map<std::string, std::string> exceptions);
  static Lemmatizer from_file(const std::filesystem::path& path);

  std::string lemma(std::string_view lowered) const;

 private:
  std::unordered_map<std::string, std::string> exceptions_;
};

struct AnalyzedToken {
  std::string lemma;
  CharRange range;
  bool content = false;  // not a stopword, not numeric, at least two chars
  bool clause_start = false;  // punctuation other than spaces separates it from the previous token
};

class TextAnalyzer {
 public:
  TextAnalyzer() = default;
  TextAnalyzer(StopwordList stopwords, Lemmatizer lemmatizer)
      : stopwords_(std::move(stopwords)), lemmatizer_(std::move(lemmatizer)) {}

  std::vector<AnalyzedToken> analyze(std::string_view text) const;

  // Lemmas of every token in `text` joined by single spaces.
  std::string canonical(std::string_view text) const;

  const StopwordList& stopwords() const { return stopwords_; }
  const Lemmatizer& lemmatizer() const { return lemmatizer_; }

 private:
  StopwordList stopwords_;
  Lemmatizer lemmatizer_;
};

// Splits on single spaces.
std::vector<std::string> split_words(std::string_view phrase);

// Case-folded lexicon match: true when `entry` occurs in `lowered_text` with
// non-alphanumeric characters (or the text edge) on both sides.
bool contains_at_word_boundary(std::string_view lowered_text, std::string_view entry);

namespace defaults {
// Contents of the data files shipped under data/lexicons and data/prompts,
// compiled in so the engine runs without a data directory.
std::string_view stopwords_en();
std::string_view lemma_exceptions_en();
std::string_view test_lexicon();
std::string_view example_lexicon();
std::string_view relation_prompt_template();
}  // namespace defaults

}  // namespace moocaug

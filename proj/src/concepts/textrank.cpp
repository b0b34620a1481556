#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "moocaug/concepts/concepts.hpp"

namespace moocaug::concepts {

TextRankResult textrank(const std::vector<std::vector<std::string>>& sequences, const TextRankOptions& options) {
  if (options.window < 2) throw ConceptsError(ConceptsErrc::kInvalidParameter, "window must be at least 2");
  if (!(options.damping > 0 && options.damping < 1)) {
    throw ConceptsError(ConceptsErrc::kInvalidParameter, "damping must lie in (0, 1)");
  }
  std::set<std::string> vocab_set;
  for (const auto& seq : sequences) vocab_set.insert(seq.begin(), seq.end());
  if (vocab_set.empty()) throw ConceptsError(ConceptsErrc::kEmptyInput, "no tokens");
  const std::vector<std::string> vocab(vocab_set.begin(), vocab_set.end());
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < vocab.size(); ++i) index.emplace(vocab[i], i);

  std::map<std::pair<std::size_t, std::size_t>, double> weight;
  for (const auto& seq : sequences) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      for (std::size_t j = i + 1; j < seq.size() && j - i < options.window; ++j) {
        const std::size_t a = index.at(seq[i]), b = index.at(seq[j]);
        if (a == b) continue;
        weight[{std::min(a, b), std::max(a, b)}] += 1.0;
      }
    }
  }
  const std::size_t n = vocab.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> neighbors(n);
  std::vector<double> out_weight(n, 0.0);
  for (const auto& [edge, w] : weight) {
    neighbors[edge.first].push_back({edge.second, w});
    neighbors[edge.second].push_back({edge.first, w});
    out_weight[edge.first] += w;
    out_weight[edge.second] += w;
  }

  std::vector<double> score(n, 1.0), next(n);
  TextRankResult result;
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    double delta = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0;
      for (const auto& [j, w] : neighbors[i]) sum += score[j] * w / out_weight[j];
      next[i] = (1 - options.damping) + options.damping * sum;
      delta = std::max(delta, std::abs(next[i] - score[i]));
    }
    score.swap(next);
    result.iterations = iter + 1;
    result.final_delta = delta;
    if (delta < options.tolerance) break;
  }

  for (std::size_t i = 0; i < n; ++i) result.terms.push_back({vocab[i], score[i]});
  std::stable_sort(result.terms.begin(), result.terms.end(), [](const ScoredTerm& a, const ScoredTerm& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.term < b.term;
  });
  return result;
}

std::vector<Keyphrase> assemble_keyphrases(const std::vector<ScoredTerm>& ranked,
                                           const std::vector<std::vector<AnalyzedToken>>& texts,
                                           const KeyphraseOptions& options) {
  const auto top_count = static_cast<std::size_t>(
      std::ceil(options.top_fraction * static_cast<double>(ranked.size()) - 1e-12));
  std::map<std::string, double> top;
  for (std::size_t i = 0; i < std::min(std::max<std::size_t>(top_count, 1), ranked.size()); ++i) {
    top.emplace(ranked[i].term, ranked[i].score);
  }

  std::map<std::string, double> candidates;
  for (const auto& text : texts) {
    std::string label;
    double score = 0;
    auto flush = [&] {
      if (!label.empty()) candidates.emplace(label, score);
      label.clear();
      score = 0;
    };
    for (const auto& tok : text) {
      if (tok.clause_start) flush();
      const auto it = tok.content ? top.find(tok.lemma) : top.end();
      if (it == top.end()) {
        flush();
        continue;
      }
      if (!label.empty()) label += ' ';
      label += tok.lemma;
      score += it->second;
    }
    flush();
  }

  std::vector<Keyphrase> out;
  for (const auto& [label, score] : candidates) out.push_back({label, score});
  std::stable_sort(out.begin(), out.end(), [](const Keyphrase& a, const Keyphrase& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.label < b.label;
  });
  if (out.size() > options.max_concepts) out.resize(options.max_concepts);
  return out;
}

}  // namespace moocaug::concepts

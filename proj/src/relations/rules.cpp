#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include "moocaug/common/parallel.hpp"
#include "moocaug/relations/relations.hpp"

namespace moocaug::relations {
namespace {

using concepts::Concept;

std::string fmt(const char* pattern, double a, double b = 0) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

// True when `needle` is an in-order, possibly gapped, subsequence of `hay`.
bool is_subsequence(const std::vector<std::string>& needle, const std::vector<std::string>& hay) {
  std::size_t k = 0;
  for (const auto& w : hay) {
    if (k < needle.size() && w == needle[k]) ++k;
  }
  return k == needle.size();
}

Relationship rule_edge(std::string src, std::string dst, RelationKind kind, double weight, std::string detail) {
  if (is_symmetric(kind) && dst < src) std::swap(src, dst);
  return {std::move(src), std::move(dst), kind, weight, {{EvidenceSource::kRule, std::move(detail)}}};
}

// Per segment, the index of its heading block: the topmost Text element
// starting above the heading line (ties: leftmost, then id).
std::map<std::size_t, std::size_t> heading_blocks(const std::vector<elements::Element>& elements, double max_y) {
  std::map<std::size_t, std::size_t> out;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& e = elements[i];
    if (e.kind != ElementKind::kText || e.bbox.y >= max_y) continue;
    auto [it, fresh] = out.emplace(e.segment_index, i);
    if (fresh) continue;
    const auto& cur = elements[it->second];
    if (std::tie(e.bbox.y, e.bbox.x, e.id) < std::tie(cur.bbox.y, cur.bbox.x, cur.id)) it->second = i;
  }
  return out;
}

}  // namespace

double pmi(std::size_t windows, std::size_t with_a, std::size_t with_b, std::size_t with_both) {
  if (with_both == 0) return -std::numeric_limits<double>::infinity();
  return std::log(static_cast<double>(with_both) * static_cast<double>(windows) /
                  (static_cast<double>(with_a) * static_cast<double>(with_b)));
}

double npmi(std::size_t windows, std::size_t with_a, std::size_t with_b, std::size_t with_both) {
  if (with_both == 0) return -1.0;
  if (with_both == windows) return 1.0;
  return pmi(windows, with_a, with_b, with_both) /
         -std::log(static_cast<double>(with_both) / static_cast<double>(windows));
}

std::vector<std::vector<std::size_t>> concept_windows(const std::vector<Concept>& concepts, std::size_t cue_count,
                                                       std::size_t width) {
  std::vector<std::vector<std::size_t>> out(concepts.size());
  if (width == 0) return out;
  for (std::size_t c = 0; c < concepts.size(); ++c) {
    for (const auto& m : concepts[c].mentions) {
      if (m.cue_index && *m.cue_index < cue_count) out[c].push_back(*m.cue_index / width);
    }
    std::sort(out[c].begin(), out[c].end());
    out[c].erase(std::unique(out[c].begin(), out[c].end()), out[c].end());
  }
  return out;
}

std::vector<Relationship> rule_relations(const std::vector<Concept>& concepts, const ingest::Transcript& transcript,
                                         const std::vector<elements::Element>& elements,
                                         const std::vector<slideseg::SlideSegment>& segments,
                                         const RuleOptions& options, const TextAnalyzer& analyzer) {
  const std::size_t n = concepts.size();
  const std::size_t width = std::max<std::size_t>(options.window_cues, 1);
  const std::size_t window_count = (transcript.cues.size() + width - 1) / width;
  const auto windows = concept_windows(concepts, transcript.cues.size(), width);
  std::vector<std::vector<char>> in_window(n, std::vector<char>(window_count, 0));
  for (std::size_t c = 0; c < n; ++c)
    for (const auto w : windows[c]) in_window[c][w] = 1;

  std::vector<std::vector<std::string>> label_tokens(n);
  std::set<std::string> label_lemmas;
  for (std::size_t c = 0; c < n; ++c) {
    label_tokens[c] = split_words(concepts[c].label);
    label_lemmas.insert(label_tokens[c].begin(), label_tokens[c].end());
  }

  // TF-IDF context vectors over the same windows, concept label lemmas excluded.
  std::vector<std::map<std::string, double>> window_terms(window_count);
  for (std::size_t i = 0; i < transcript.cues.size(); ++i) {
    for (const auto& t : analyzer.analyze(transcript.cues[i].text)) {
      if (t.content && !label_lemmas.count(t.lemma)) window_terms[i / width][t.lemma] += 1;
    }
  }
  std::map<std::string, double> idf;
  for (const auto& terms : window_terms)
    for (const auto& [term, count] : terms) idf[term] += 1;
  for (auto& [term, df] : idf) df = std::log(static_cast<double>(window_count) / df);
  std::vector<std::map<std::string, double>> context(n);
  std::vector<double> norm(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    for (const auto w : windows[c])
      for (const auto& [term, count] : window_terms[w]) context[c][term] += count;
    for (auto& [term, v] : context[c]) {
      v *= idf[term];
      norm[c] += v * v;
    }
    norm[c] = std::sqrt(norm[c]);
  }

  // Heading nesting: segments whose heading block mentions each concept.
  const auto headings = heading_blocks(elements, options.heading_max_y);
  std::unordered_map<std::string, std::size_t> element_index;
  for (std::size_t i = 0; i < elements.size(); ++i) element_index.emplace(elements[i].id, i);
  std::vector<std::set<std::size_t>> heads_of(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (const auto& m : concepts[c].mentions) {
      if (!m.element_id) continue;
      const auto it = element_index.find(*m.element_id);
      if (it == element_index.end()) continue;
      const auto& e = elements[it->second];
      const auto h = headings.find(e.segment_index);
      if (h != headings.end() && h->second == it->second) heads_of[c].insert(e.segment_index);
    }
  }
  // Segments holding each mention of b, or nullopt when some mention sits
  // in a heading block, outside the course, or b has no element mention.
  auto nested_segments = [&](std::size_t b) -> std::optional<std::set<std::size_t>> {
    std::set<std::size_t> segs;
    bool any_element = false;
    for (const auto& m : concepts[b].mentions) {
      if (m.element_id) {
        const auto it = element_index.find(*m.element_id);
        if (it == element_index.end()) return std::nullopt;
        const auto& e = elements[it->second];
        const auto h = headings.find(e.segment_index);
        if (h != headings.end() && h->second == it->second) return std::nullopt;
        segs.insert(e.segment_index);
        any_element = true;
      } else {
        const auto s = elements::segment_at(segments, m.t_ms);
        if (!s) return std::nullopt;
        segs.insert(*s);
      }
    }
    if (!any_element) return std::nullopt;
    return segs;
  };
  std::vector<std::optional<std::set<std::size_t>>> nested(n);
  for (std::size_t c = 0; c < n; ++c) nested[c] = nested_segments(c);

  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  const auto found = parallel_map(rows, options.max_concurrency, [&](std::size_t a) {
    std::vector<Relationship> out;
    const auto& ida = concepts[a].id;
    for (std::size_t b = 0; b < n; ++b) {
      if (b == a) continue;
      const auto& idb = concepts[b].id;

      // Inclusion a ⊃ b.
      if (label_tokens[a].size() < label_tokens[b].size() && is_subsequence(label_tokens[a], label_tokens[b])) {
        out.push_back(rule_edge(ida, idb, RelationKind::kInclusion, 1.0,
                                "label \"" + concepts[b].label + "\" contains \"" + concepts[a].label + "\""));
      } else if (nested[b] && !heads_of[a].empty() &&
                 std::includes(heads_of[a].begin(), heads_of[a].end(), nested[b]->begin(), nested[b]->end())) {
        out.push_back(rule_edge(ida, idb, RelationKind::kInclusion, 1.0,
                                "mentions nested under the heading block of \"" + concepts[a].label + "\""));
      }

      if (b < a) continue;  // symmetric kinds once per pair
      std::size_t na = 0, nb = 0, nab = 0;
      for (std::size_t w = 0; w < window_count; ++w) {
        na += static_cast<std::size_t>(in_window[a][w]);
        nb += static_cast<std::size_t>(in_window[b][w]);
        nab += static_cast<std::size_t>(in_window[a][w] && in_window[b][w]);
      }
      if (nab > 0) {
        const double p = pmi(window_count, na, nb, nab);
        if (p > options.tau_pmi) {
          const double w = std::min(1.0, npmi(window_count, na, nb, nab));
          out.push_back(rule_edge(ida, idb, RelationKind::kAssociation, w, fmt("pmi %.6f npmi %.6f", p, w)));
        }
      }
      if (norm[a] > 0 && norm[b] > 0) {
        double dot = 0;
        for (const auto& [term, v] : context[a]) {
          const auto it = context[b].find(term);
          if (it != context[b].end()) dot += v * it->second;
        }
        const double cosine = dot / (norm[a] * norm[b]);
        if (cosine > 0 && cosine >= options.tau_sim) {
          out.push_back(rule_edge(ida, idb, RelationKind::kSimilarity, std::min(1.0, cosine),
                                  fmt("context cosine %.6f", cosine)));
        }
      }
    }
    return out;
  });

  std::vector<Relationship> all;
  for (const auto& row : found) all.insert(all.end(), row.begin(), row.end());
  std::sort(all.begin(), all.end(), [](const Relationship& x, const Relationship& y) {
    return std::tie(x.kind, x.src, x.dst) < std::tie(y.kind, y.src, y.dst);
  });
  return all;
}

}  // namespace moocaug::relations

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "moocaug/structure/structure.hpp"

namespace moocaug::structure {
namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double beta_log_pdf(double t, const BetaShape& s) {
  return (s.a - 1) * std::log(t) + (s.b - 1) * std::log1p(-t) -
         (std::lgamma(s.a) + std::lgamma(s.b) - std::lgamma(s.a + s.b));
}

struct Counts {
  std::vector<std::vector<std::size_t>> doc_topic;   // D x K
  std::vector<std::vector<std::size_t>> topic_word;  // K x V
  std::vector<std::size_t> topic_total;              // K

  friend bool operator==(const Counts&, const Counts&) = default;
};

Counts recount(const std::vector<std::vector<std::size_t>>& words, const std::vector<std::vector<std::size_t>>& z,
               std::size_t K, std::size_t V) {
  Counts c{std::vector<std::vector<std::size_t>>(words.size(), std::vector<std::size_t>(K, 0)),
           std::vector<std::vector<std::size_t>>(K, std::vector<std::size_t>(V, 0)), std::vector<std::size_t>(K, 0)};
  for (std::size_t d = 0; d < words.size(); ++d) {
    for (std::size_t i = 0; i < words[d].size(); ++i) {
      ++c.doc_topic[d][z[d][i]];
      ++c.topic_word[z[d][i]][words[d][i]];
      ++c.topic_total[z[d][i]];
    }
  }
  return c;
}

}  // namespace

double beta_mode(const BetaShape& s) {
  if (s.a > 1 && s.b > 1) return (s.a - 1) / (s.a + s.b - 2);
  return s.a / (s.a + s.b);
}

BetaShape fit_beta_moments(const std::vector<double>& samples, double variance_floor) {
  if (samples.size() < 2) return {};
  double mean = 0;
  for (const double x : samples) mean += x;
  mean /= static_cast<double>(samples.size());
  double var = 0;
  for (const double x : samples) var += (x - mean) * (x - mean);
  var /= static_cast<double>(samples.size());
  if (var < 1e-15) return {};
  var = std::max(var, variance_floor);
  const double common = mean * (1 - mean) / var - 1;
  if (!(common > 0)) return {};
  return {mean * common, (1 - mean) * common};
}

TotModel tot_fit(const std::vector<TotDocument>& docs, const TotOptions& options) {
  if (docs.empty()) throw StructureError(StructureErrc::kEmptyCorpus, "topic model: no documents");
  if (options.topics < 1) throw StructureError(StructureErrc::kInvalidTopicCount, "topic model: K must be >= 1");
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (docs[d].words.empty()) {
      throw StructureError(StructureErrc::kEmptyDocument, "topic model: document " + std::to_string(d) + " is empty");
    }
  }
  const std::size_t K = options.topics, D = docs.size();

  TotModel m;
  m.K = K;
  m.alpha = options.alpha.value_or(50.0 / static_cast<double>(K));
  m.beta = options.beta;
  for (const auto& doc : docs) m.vocabulary.insert(m.vocabulary.end(), doc.words.begin(), doc.words.end());
  std::sort(m.vocabulary.begin(), m.vocabulary.end());
  m.vocabulary.erase(std::unique(m.vocabulary.begin(), m.vocabulary.end()), m.vocabulary.end());
  const std::size_t V = m.vocabulary.size();

  std::vector<std::vector<std::size_t>> words(D);
  std::vector<double> t(D);
  for (std::size_t d = 0; d < D; ++d) {
    for (const auto& w : docs[d].words) {
      words[d].push_back(static_cast<std::size_t>(
          std::lower_bound(m.vocabulary.begin(), m.vocabulary.end(), w) - m.vocabulary.begin()));
    }
    t[d] = std::clamp(docs[d].timestamp, options.epsilon, 1 - options.epsilon);
  }

  std::mt19937_64 rng(options.seed);
  auto& z = m.assignments;
  z.assign(D, {});
  for (std::size_t d = 0; d < D; ++d) {
    for (std::size_t i = 0; i < words[d].size(); ++i) {
      z[d].push_back(std::min(K - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(K))));
    }
  }
  Counts c = recount(words, z, K, V);
  m.psi.assign(K, BetaShape{});

  const double vbeta = static_cast<double>(V) * m.beta;
  std::vector<double> logp(K), time_term(D * K);
  for (std::size_t sweep = 0; sweep < options.iterations; ++sweep) {
    for (std::size_t d = 0; d < D; ++d)
      for (std::size_t k = 0; k < K; ++k) time_term[d * K + k] = beta_log_pdf(t[d], m.psi[k]);

    for (std::size_t d = 0; d < D; ++d) {
      for (std::size_t i = 0; i < words[d].size(); ++i) {
        const std::size_t w = words[d][i], old = z[d][i];
        --c.doc_topic[d][old];
        --c.topic_word[old][w];
        --c.topic_total[old];
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < K; ++k) {
          logp[k] = std::log(static_cast<double>(c.doc_topic[d][k]) + m.alpha) +
                    std::log(static_cast<double>(c.topic_word[k][w]) + m.beta) -
                    std::log(static_cast<double>(c.topic_total[k]) + vbeta) + time_term[d * K + k];
          top = std::max(top, logp[k]);
        }
        double total = 0;
        for (std::size_t k = 0; k < K; ++k) total += (logp[k] = std::exp(logp[k] - top));
        const double u = uniform01(rng) * total;
        std::size_t pick = K - 1;
        double cum = 0;
        for (std::size_t k = 0; k < K; ++k) {
          cum += logp[k];
          if (u < cum) {
            pick = k;
            break;
          }
        }
        z[d][i] = pick;
        ++c.doc_topic[d][pick];
        ++c.topic_word[pick][w];
        ++c.topic_total[pick];
      }
    }

    std::vector<std::vector<double>> stamps(K);
    for (std::size_t d = 0; d < D; ++d)
      for (const auto k : z[d]) stamps[k].push_back(t[d]);
    for (std::size_t k = 0; k < K; ++k) m.psi[k] = fit_beta_moments(stamps[k], options.variance_floor);

    bool check = options.verify_counts;
#ifndef NDEBUG
    check = true;
#endif
    if (check && !(recount(words, z, K, V) == c)) {
      throw StructureError(StructureErrc::kInconsistentCounts,
                           "topic model: count caches diverged in sweep " + std::to_string(sweep));
    }
  }

  m.phi.assign(K, std::vector<double>(V, 0.0));
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t w = 0; w < V; ++w)
      m.phi[k][w] = (static_cast<double>(c.topic_word[k][w]) + m.beta) /
                    (static_cast<double>(c.topic_total[k]) + vbeta);
  m.theta.assign(D, std::vector<double>(K, 0.0));
  const double kalpha = static_cast<double>(K) * m.alpha;
  for (std::size_t d = 0; d < D; ++d)
    for (std::size_t k = 0; k < K; ++k)
      m.theta[d][k] = (static_cast<double>(c.doc_topic[d][k]) + m.alpha) /
                      (static_cast<double>(words[d].size()) + kalpha);
  return m;
}

std::vector<TotDocument> cue_window_documents(const ingest::Transcript& transcript, std::size_t window_cues,
                                              std::int64_t duration_ms, const TextAnalyzer& analyzer) {
  const std::size_t width = std::max<std::size_t>(window_cues, 1);
  const auto& cues = transcript.cues;
  std::vector<TotDocument> docs;
  for (std::size_t first = 0; first < cues.size(); first += width) {
    const std::size_t last = std::min(cues.size(), first + width) - 1;
    TotDocument doc;
    for (std::size_t i = first; i <= last; ++i)
      for (const auto& tok : analyzer.analyze(cues[i].text))
        if (tok.content) doc.words.push_back(tok.lemma);
    if (doc.words.empty()) continue;
    doc.t_ms = (cues[first].start_ms + cues[last].end_ms) / 2;
    doc.timestamp = duration_ms > 0 ? static_cast<double>(doc.t_ms) / static_cast<double>(duration_ms) : 0.5;
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::size_t default_topic_count(std::size_t segment_count) { return std::clamp<std::size_t>(segment_count, 2, 10); }

Json topic_report(const TotModel& model, const std::vector<TotDocument>& docs,
                  const std::vector<slideseg::SlideSegment>& segments, std::size_t top_words) {
  Json topics = Json::array();
  for (std::size_t k = 0; k < model.K; ++k) {
    std::vector<std::size_t> order(model.vocabulary.size());
    for (std::size_t w = 0; w < order.size(); ++w) order[w] = w;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return model.phi[k][a] > model.phi[k][b]; });
    Json top = Json::array();
    for (std::size_t r = 0; r < std::min(top_words, order.size()); ++r) top.push_back(model.vocabulary[order[r]]);
    topics.push_back({{"index", k},
                      {"top_words", top},
                      {"psi", {model.psi[k].a, model.psi[k].b}},
                      {"mode", beta_mode(model.psi[k])}});
  }
  Json per_segment = Json::array();
  for (const auto& s : segments) {
    std::vector<std::size_t> tally(model.K, 0);
    for (std::size_t d = 0; d < docs.size() && d < model.assignments.size(); ++d) {
      if (docs[d].t_ms < s.start_ms || docs[d].t_ms >= s.end_ms) continue;
      for (const auto k : model.assignments[d]) ++tally[k];
    }
    const auto best = std::max_element(tally.begin(), tally.end());
    if (best == tally.end() || *best == 0) per_segment.push_back(nullptr);
    else per_segment.push_back(static_cast<std::size_t>(best - tally.begin()));
  }
  return {{"topics", topics}, {"segment_topics", per_segment}, {"alpha", model.alpha}, {"beta", model.beta}};
}

}  // namespace moocaug::structure

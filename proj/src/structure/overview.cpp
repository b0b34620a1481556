#include <algorithm>
#include <cmath>
#include <map>

#include "moocaug/structure/structure.hpp"

namespace moocaug::structure {

ImportanceCurve importance_curve(const std::vector<concepts::Concept>& concepts, std::int64_t duration_ms,
                                 std::int64_t stride_ms) {
  ImportanceCurve curve;
  if (stride_ms <= 0) return curve;
  for (std::int64_t t = 0; t < duration_ms; t += stride_ms) {
    double v = 0;
    for (const auto& c : concepts) {
      for (const auto& s : c.spans) {
        if (s.contains(t)) {
          v = std::max(v, c.importance);
          break;
        }
      }
    }
    curve.samples.push_back({t, std::clamp(v, 0.0, 1.0)});
  }
  return curve;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<std::int64_t> key_time_nodes(const ImportanceCurve& curve, const TimeNodeOptions& options) {
  const auto& s = curve.samples;
  std::vector<double> values;
  for (const auto& x : s) values.push_back(x.value);
  const double threshold = quantile(values, options.quantile);

  // Peaks: plateaus with at least one neighbor, every neighbor strictly lower.
  struct Peak {
    std::int64_t t_ms;
    double value;
  };
  std::vector<Peak> peaks;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = i;
    while (j + 1 < s.size() && s[j + 1].value == s[i].value) ++j;
    const bool has_neighbor = i > 0 || j + 1 < s.size();
    const bool left_lower = i == 0 || s[i - 1].value < s[i].value;
    const bool right_lower = j + 1 == s.size() || s[j + 1].value < s[i].value;
    if (has_neighbor && left_lower && right_lower && s[i].value >= threshold) {
      peaks.push_back({s[(i + j) / 2].t_ms, s[i].value});
    }
    i = j + 1;
  }
  std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.value > b.value; });
  std::vector<std::int64_t> nodes;
  for (const auto& p : peaks) {
    const bool clear = std::all_of(nodes.begin(), nodes.end(),
                                   [&](std::int64_t n) { return std::llabs(n - p.t_ms) >= options.min_gap_ms; });
    if (clear) nodes.push_back(p.t_ms);
  }
  std::sort(nodes.begin(), nodes.end());
  return nodes;
}

std::vector<OverviewGroup> partition_overview(const std::vector<concepts::Concept>& concepts) {
  std::map<concepts::DeliveryStyle, OverviewGroup> by_style;
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    auto& g = by_style[concepts[i].delivery_style];
    g.style = concepts[i].delivery_style;
    g.concepts.push_back(i);
  }
  std::vector<OverviewGroup> groups;
  for (auto& [style, g] : by_style) {
    std::stable_sort(g.concepts.begin(), g.concepts.end(), [&](std::size_t a, std::size_t b) {
      return concepts[a].first_mention_ms() < concepts[b].first_mention_ms();
    });
    groups.push_back(std::move(g));
  }
  std::stable_sort(groups.begin(), groups.end(), [&](const OverviewGroup& a, const OverviewGroup& b) {
    return concepts[a.concepts.front()].first_mention_ms() < concepts[b.concepts.front()].first_mention_ms();
  });
  return groups;
}

void label_groups(std::vector<OverviewGroup>& groups, const std::vector<concepts::Concept>& concepts,
                  const TotModel& model, std::size_t label_words) {
  const auto& vocab = model.vocabulary;
  for (auto& g : groups) {
    std::vector<double> mass(model.K, 0.0);
    bool any = false;
    for (const auto i : g.concepts) {
      for (const auto& w : split_words(concepts[i].label)) {
        const auto it = std::lower_bound(vocab.begin(), vocab.end(), w);
        if (it == vocab.end() || *it != w) continue;
        any = true;
        const auto wi = static_cast<std::size_t>(it - vocab.begin());
        for (std::size_t k = 0; k < model.K; ++k) mass[k] += model.phi[k][wi];
      }
    }
    g.topic.reset();
    g.topic_label.clear();
    if (!any) continue;
    const auto k = static_cast<std::size_t>(std::max_element(mass.begin(), mass.end()) - mass.begin());
    g.topic = k;
    std::vector<std::size_t> order(vocab.size());
    for (std::size_t w = 0; w < order.size(); ++w) order[w] = w;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return model.phi[k][a] > model.phi[k][b]; });
    for (std::size_t r = 0; r < std::min(label_words, order.size()); ++r) {
      if (r) g.topic_label += ' ';
      g.topic_label += vocab[order[r]];
    }
  }
}

}  // namespace moocaug::structure

#include "moocaug/common/interval.hpp"

#include <algorithm>

namespace moocaug {

std::vector<Interval> merge_intervals(std::vector<Interval> intervals,
                                      std::int64_t join_gap_ms) {
  std::erase_if(intervals, [](const Interval& iv) { return iv.length() <= 0; });
  std::sort(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) {
    return a.start_ms != b.start_ms ? a.start_ms < b.start_ms : a.end_ms < b.end_ms;
  });
  std::vector<Interval> out;
  for (const auto& iv : intervals) {
    if (!out.empty()) {
      auto& last = out.back();
      const bool touching = iv.start_ms <= last.end_ms;
      const bool close = iv.start_ms - last.end_ms < join_gap_ms;
      if (touching || close) {
        last.end_ms = std::max(last.end_ms, iv.end_ms);
        continue;
      }
    }
    out.push_back(iv);
  }
  return out;
}

std::int64_t total_length(const std::vector<Interval>& merged) {
  std::int64_t total = 0;
  for (const auto& iv : merged) total += iv.length();
  return total;
}

std::int64_t overlap_length(const Interval& a, const std::vector<Interval>& merged) {
  std::int64_t total = 0;
  for (const auto& iv : merged) {
    const auto lo = std::max(a.start_ms, iv.start_ms);
    const auto hi = std::min(a.end_ms, iv.end_ms);
    if (hi > lo) total += hi - lo;
  }
  return total;
}

}  // namespace moocaug

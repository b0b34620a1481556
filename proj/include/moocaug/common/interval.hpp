#pragma once

#include <cstdint>
#include <vector>

namespace moocaug {

// Half-open time interval [start_ms, end_ms).
struct Interval {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;

  std::int64_t length() const { return end_ms > start_ms ? end_ms - start_ms : 0; }
  bool contains(std::int64_t t) const { return t >= start_ms && t < end_ms; }
  bool overlaps(const Interval& o) const {
    return start_ms < o.end_ms && o.start_ms < end_ms;
  }

  friend bool operator==(const Interval&, const Interval&) = default;
};

// Sorts and unions intervals. Two intervals whose gap is strictly less than
// `join_gap_ms` are fused into one (the gap becomes part of the result).
std::vector<Interval> merge_intervals(std::vector<Interval> intervals,
                                      std::int64_t join_gap_ms = 0);

std::int64_t total_length(const std::vector<Interval>& merged);

// Length of the intersection of `a` with the union of `merged`.
std::int64_t overlap_length(const Interval& a, const std::vector<Interval>& merged);

}  // namespace moocaug

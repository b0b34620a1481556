#include "moocaug/slideseg/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "moocaug/slideseg/emd.hpp"

namespace moocaug::slideseg {

std::vector<BoundaryCandidate> detect_boundaries(const ingest::FrameSeries& series, double theta_emd) {
  if (series.frames.size() < 2) {
    throw SegmentationError(SegmentationErrc::kTooFewFrames,
                            "need at least two frames, got " + std::to_string(series.frames.size()));
  }
  if (!(theta_emd > 0)) throw SegmentationError(SegmentationErrc::kInvalidThreshold, "theta_emd must be positive");
  std::vector<BoundaryCandidate> out;
  for (std::size_t i = 1; i < series.frames.size(); ++i) {
    const double d = emd_1d(series.frames[i - 1].histogram, series.frames[i].histogram);
    if (d > theta_emd) out.push_back({i, series.frames[i].t_ms, d});
  }
  return out;
}

std::size_t select_keyframe(const SlideSegment& segment, const ingest::FrameSeries& series, bool closed_end) {
  std::size_t best = series.frames.size();
  for (std::size_t i = 0; i < series.frames.size(); ++i) {
    const auto& f = series.frames[i];
    const bool inside = f.t_ms >= segment.start_ms &&
                        (f.t_ms < segment.end_ms || (closed_end && f.t_ms == segment.end_ms));
    if (!inside) continue;
    if (best == series.frames.size() || f.edge_density >= series.frames[best].edge_density) best = i;
  }
  if (best == series.frames.size()) {
    throw SegmentationError(SegmentationErrc::kEmptySegment,
                            "no frame in [" + std::to_string(segment.start_ms) + ", " +
                                std::to_string(segment.end_ms) + ")");
  }
  return best;
}

Segmentation refine_boundaries(const std::vector<BoundaryCandidate>& candidates,
                               const ingest::FrameSeries& series, std::int64_t course_duration_ms,
                               const SegmentationOptions& options) {
  if (course_duration_ms <= 0) {
    throw SegmentationError(SegmentationErrc::kInvalidDuration, "course duration must be positive");
  }
  Segmentation result;
  double best_product = 0;
  for (const auto& c : candidates) {
    CandidateVerdict v;
    v.candidate = c;
    v.edge_before = series.frames.at(c.frame_index - 1).edge_density;
    v.edge_after = series.frames.at(c.frame_index).edge_density;
    v.edge_change_ratio = std::abs(v.edge_after - v.edge_before) / std::max(v.edge_before, options.edge_epsilon);
    v.survived = v.edge_change_ratio > options.theta_edge && c.t_ms > 0 && c.t_ms < course_duration_ms;
    if (v.survived) {
      v.confidence = (c.emd - options.theta_emd) * v.edge_change_ratio;
      best_product = std::max(best_product, v.confidence);
    }
    result.verdicts.push_back(v);
  }
  for (auto& v : result.verdicts) {
    if (!v.survived) continue;
    v.confidence = best_product > 0 ? v.confidence / best_product : 1.0;
  }

  std::int64_t start = 0;
  double confidence = 1.0;
  auto close_segment = [&](std::int64_t end) {
    SlideSegment s;
    s.index = result.segments.size();
    s.start_ms = start;
    s.end_ms = end;
    s.boundary_confidence = confidence;
    result.segments.push_back(s);
  };
  for (const auto& v : result.verdicts) {
    if (!v.survived || v.candidate.t_ms <= start) continue;
    close_segment(v.candidate.t_ms);
    start = v.candidate.t_ms;
    confidence = v.confidence;
  }
  close_segment(course_duration_ms);

  for (auto& s : result.segments) {
    const bool last = s.index + 1 == result.segments.size();
    s.keyframe_frame = select_keyframe(s, series, last);
    s.keyframe_t_ms = series.frames[s.keyframe_frame].t_ms;
  }
  return result;
}

Segmentation segment_slides(const ingest::FrameSeries& series, std::int64_t course_duration_ms,
                            const SegmentationOptions& options) {
  return refine_boundaries(detect_boundaries(series, options.theta_emd), series, course_duration_ms, options);
}

Json Segmentation::report() const {
  Json candidates = Json::array();
  for (const auto& v : verdicts) {
    candidates.push_back({{"t_ms", v.candidate.t_ms},
                          {"emd", v.candidate.emd},
                          {"edge_before", v.edge_before},
                          {"edge_after", v.edge_after},
                          {"edge_change_ratio", v.edge_change_ratio},
                          {"survived", v.survived},
                          {"confidence", v.confidence}});
  }
  Json survivors = Json::array();
  for (const auto& s : segments) {
    if (s.index > 0) survivors.push_back({{"t_ms", s.start_ms}, {"confidence", s.boundary_confidence}});
  }
  return {{"candidates", candidates}, {"survivors", survivors}, {"segment_count", segments.size()}};
}

}  // namespace moocaug::slideseg

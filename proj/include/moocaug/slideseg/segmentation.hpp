#pragma once

#include <cstdint>
#include <vector>

#include "moocaug/common/canonical_json.hpp"
#include "moocaug/common/error.hpp"
#include "moocaug/ingest/frames.hpp"

namespace moocaug::slideseg {

enum class SegmentationErrc { kTooFewFrames, kInvalidThreshold, kEmptySegment, kInvalidDuration };

using SegmentationError = CodedError<SegmentationErrc>;

struct SlideSegment {
  std::size_t index = 0;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  std::int64_t keyframe_t_ms = 0;
  std::size_t keyframe_frame = 0;   // index into the FrameSeries
  double boundary_confidence = 1;   // confidence of the boundary opening the segment

  friend bool operator==(const SlideSegment&, const SlideSegment&) = default;
};

struct BoundaryCandidate {
  std::size_t frame_index = 0;  // the frame after the jump
  std::int64_t t_ms = 0;
  double emd = 0;

  friend bool operator==(const BoundaryCandidate&, const BoundaryCandidate&) = default;
};

struct SegmentationOptions {
  double theta_emd = 0.15;
  double theta_edge = 0.3;
  double edge_epsilon = 1e-6;
};

// Every frame t whose EMD to frame t-1 exceeds theta_emd, in time order.
// Throws kTooFewFrames for fewer than two frames, kInvalidThreshold for
// theta_emd <= 0.
std::vector<BoundaryCandidate> detect_boundaries(const ingest::FrameSeries& series, double theta_emd);

struct CandidateVerdict {
  BoundaryCandidate candidate;
  double edge_before = 0;
  double edge_after = 0;
  double edge_change_ratio = 0;
  bool survived = false;
  double confidence = 0;
};

struct Segmentation {
  std::vector<SlideSegment> segments;
  std::vector<CandidateVerdict> verdicts;

  Json report() const;
};

// Keeps candidates whose edge-change ratio
//   |edge_after - edge_before| / max(edge_before, epsilon)
// exceeds theta_edge and turns the survivors into a partition of
// [0, course_duration_ms]. A survivor's confidence is its
// (emd - theta_emd) * ratio product divided by the largest such product;
// the first segment has confidence 1.
Segmentation refine_boundaries(const std::vector<BoundaryCandidate>& candidates,
                               const ingest::FrameSeries& series, std::int64_t course_duration_ms,
                               const SegmentationOptions& options = {});

// Time of the frame with maximal edge density in [start_ms, end_ms); ties go
// to the latest frame. The last segment also owns a frame at end_ms.
// Returns the frame index. Throws kEmptySegment when no frame falls inside.
std::size_t select_keyframe(const SlideSegment& segment, const ingest::FrameSeries& series,
                            bool closed_end = false);

// detect + refine in one call.
Segmentation segment_slides(const ingest::FrameSeries& series, std::int64_t course_duration_ms,
                            const SegmentationOptions& options = {});

}  // namespace moocaug::slideseg

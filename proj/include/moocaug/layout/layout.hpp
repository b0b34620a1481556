#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "moocaug/common/canonical_json.hpp"
#include "moocaug/common/error.hpp"
#include "moocaug/common/taxonomy.hpp"
#include "moocaug/common/text.hpp"
#include "moocaug/concepts/concepts.hpp"
#include "moocaug/elements/elements.hpp"
#include "moocaug/ingest/transcript.hpp"
#include "moocaug/relations/relations.hpp"
#include "moocaug/structure/structure.hpp"

namespace moocaug::layout {

enum class LayoutErrc { kOutOfRange };

using LayoutError = CodedError<LayoutErrc>;

// ---- glyphs ---------------------------------------------------------------------

enum class GlyphShape { kCircle, kRectangle, kHexagon, kTriangle };
enum class ColorRole { kConceptBlue, kFigureTableGreen, kEquationCodeRed, kExampleTestYellow };

std::string_view to_string(GlyphShape s);
std::string_view to_string(ColorRole c);

struct GlyphSpec {
  GlyphShape shape = GlyphShape::kCircle;
  ColorRole color_role = ColorRole::kConceptBlue;
  friend bool operator==(const GlyphSpec&, const GlyphSpec&) = default;
};

inline constexpr GlyphSpec kConceptGlyph{GlyphShape::kCircle, ColorRole::kConceptBlue};

// Text carries concept terms and takes the concept glyph; TeacherImage and
// Subtitle are overlay-only and have none.
std::optional<GlyphSpec> element_glyph(ElementKind kind);

// ---- radial ---------------------------------------------------------------------

inline constexpr double kPi = 3.14159265358979323846;

// -pi/2 at t = 0, clockwise; t = duration wraps to -pi/2. Result in
// [-pi/2, 3pi/2). Throws kOutOfRange unless 0 <= t <= duration, duration > 0.
double timeline_angle(std::int64_t t_ms, std::int64_t duration_ms);

inline constexpr std::array<std::string_view, 5> kImportanceRamp = {"#DEEBF7", "#9ECAE1", "#6BAED6", "#3182BD",
                                                                    "#08519C"};

// Ramp step of `importance` given the course's importance values: the
// number of quintile thresholds (20/40/60/80 %) it reaches.
std::size_t importance_step(double importance, const std::vector<double>& course_importances);

enum class MarkerKind { kAssocCircleLight, kSimCircleDark };
enum class Connector { kCurve, kOrthogonalTick };

struct InnerMarker {
  double angle_rad = 0;
  std::int64_t t_ms = 0;
  MarkerKind kind = MarkerKind::kAssocCircleLight;
  Connector connector = Connector::kCurve;
  std::string target_concept;
};

struct Arc {
  double start_angle = 0;
  double end_angle = 0;  // wraps to -pi/2 for an arc ending at the course end
  double sweep_rad = 0;
  Interval interval;
};

struct RingEntry {
  std::string element_id;
  GlyphSpec glyph;
};

struct SubBand {
  std::string concept_id;
  double offset_norm = 0;  // child's first mention / course duration
  double length_norm = 0;  // child's duration / course duration
};

struct RadialLayout {
  std::string concept_id;
  std::string center_color;
  std::size_t color_step = 0;
  double radius_px_norm = 0;
  std::vector<InnerMarker> inner_markers;  // by angle, then target id
  std::vector<Arc> arcs;                   // by start angle
  std::vector<RingEntry> outer_ring;       // mention order
  std::vector<SubBand> sub_bands;          // chronological
};

struct LayoutOptions {
  double r_min = 0.35;
  double r_max = 1.0;
  std::int64_t follow_ms = 60000;
  double slot_margin = 0.02;  // normalized gap between bbox and icon ring
};

// r_min + (r_max - r_min) * sqrt(duration / max_duration).
double radius_norm(std::int64_t duration_ms, std::int64_t max_duration_ms, const LayoutOptions& options = {});

// Everything a per-concept layout reads.
struct CourseView {
  std::int64_t duration_ms = 0;
  const std::vector<concepts::Concept>* concepts = nullptr;
  const relations::ConceptGraph* graph = nullptr;
  const std::vector<elements::Element>* elements = nullptr;
  const ingest::Transcript* transcript = nullptr;
};

struct StageAssignment {
  std::string concept_id;
  std::vector<std::string> preparation;    // concept ids
  std::vector<std::string> demonstration;  // element ids
  std::vector<std::string> application;    // element ids
};

// Preparation: concepts joined by Association or Inclusion (either
// direction) first mentioned strictly earlier. Demonstration: basic elements
// overlapping a span. Application: Example/Test elements starting at a
// span's end or up to follow_ms after it.
StageAssignment stage_assign(std::size_t concept_index, const CourseView& course, const LayoutOptions& options = {});

RadialLayout radial_layout(std::size_t concept_index, const CourseView& course, const LayoutOptions& options = {});

// ---- tracks ---------------------------------------------------------------------

struct HighlightBox {
  std::string element_id;
  Interval t_range;
  BBox bbox;
  ColorRole color_role = ColorRole::kConceptBlue;
};

struct EmphasisSpan {
  std::size_t cue_index = 0;
  std::string concept_id;
  std::vector<CharRange> ranges;  // byte ranges into the cue text
};

struct FocusIcon {
  std::string element_id;  // the related element the icon stands for
  GlyphSpec glyph;
  std::size_t slot = 0;  // 0 = top, clockwise
  double x = 0;
  double y = 0;
};

struct FocusCluster {
  std::string element_id;
  std::string concept_id;
  std::vector<FocusIcon> icons;
};

struct TrackSet {
  std::vector<HighlightBox> highlights;
  std::vector<EmphasisSpan> subtitle_emphasis;
  std::vector<FocusCluster> focus_clusters;
};

inline constexpr std::size_t kSlotCount = 8;

// Centers of the 8 ring slots around a box, slot 0 above it, clockwise.
std::array<std::array<double, 2>, kSlotCount> slot_positions(const BBox& box, double margin);

// Each target (in order) takes the free slot nearest to it (ties: lower
// slot). Targets beyond the eighth get no slot.
std::vector<std::size_t> assign_slots(const BBox& box, const std::vector<std::array<double, 2>>& targets,
                                      double margin);

TrackSet highlight_tracks(const CourseView& course, const LayoutOptions& options = {},
                          const TextAnalyzer& analyzer = {});

Json to_json(const RadialLayout& r);
Json to_json(const StageAssignment& s);
Json to_json(const TrackSet& t);

}  // namespace moocaug::layout

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "moocaug/common/canonical_json.hpp"
#include "moocaug/common/error.hpp"
#include "moocaug/layout/layout.hpp"
#include "moocaug/manifest/state_machine.hpp"
#include "moocaug/slideseg/segmentation.hpp"
#include "moocaug/structure/structure.hpp"

namespace moocaug::manifest {

inline constexpr std::string_view kSchemaVersion = "1.0";
inline constexpr std::array<std::string_view, 1> kSupportedSchemaVersions = {"1.0"};

enum class ManifestErrc { kDanglingReference, kSchemaVersionMismatch, kInvalid };

using ManifestError = CodedError<ManifestErrc>;

// Everything the manifest serializes. The pointers must outlive the call.
struct ManifestInputs {
  std::string schema_version = std::string(kSchemaVersion);
  std::string course_id;
  std::int64_t duration_ms = 0;
  const std::vector<slideseg::SlideSegment>* segments = nullptr;
  std::vector<std::string> keyframe_assets;  // per segment, relative to the course's asset root
  const ingest::Transcript* transcript = nullptr;
  const std::vector<elements::Element>* elements = nullptr;
  const std::vector<concepts::Concept>* concepts = nullptr;
  const relations::ConceptGraph* graph = nullptr;
  Json topics;  // structure::topic_report
  const layout::TrackSet* tracks = nullptr;
  const structure::ImportanceCurve* importance_curve = nullptr;
  std::int64_t curve_stride_ms = 1000;
  const std::vector<std::int64_t>* time_nodes = nullptr;
  const std::vector<structure::OverviewGroup>* overview = nullptr;
  const std::vector<layout::RadialLayout>* radial_layouts = nullptr;
  const std::vector<layout::StageAssignment>* stages = nullptr;
  InteractionConfig interaction;
};

// Assembles and validates the manifest. Throws DanglingReference naming
// the broken link and SchemaVersionMismatch for an unsupported version;
// any other violation throws kInvalid.
Json build_manifest(const ManifestInputs& in);

// Canonical bytes of a manifest.
std::string serialize_manifest(const Json& manifest);

enum class ViolationKind { kParse, kSchemaVersionMismatch, kSchema, kDanglingReference, kInconsistent };

std::string_view to_string(ViolationKind k);

struct Violation {
  ViolationKind kind = ViolationKind::kSchema;
  std::string path;  // JSON pointer; for kParse, "@<byte offset>"
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_manifest(std::string_view bytes);
// Same checks on an already parsed document.
ValidationReport validate_document(const Json& manifest);

Json to_json(const ValidationReport& r);

}  // namespace moocaug::manifest

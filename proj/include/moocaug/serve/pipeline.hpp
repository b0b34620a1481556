#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "moocaug/common/canonical_json.hpp"
#include "moocaug/common/json_transport.hpp"
#include "moocaug/serve/config.hpp"

namespace moocaug::serve {

inline constexpr std::array<std::string_view, 8> kStageNames = {
    "ingest", "slideseg", "elements", "concepts", "relations", "structure", "layout", "manifest"};

enum class StageStatus { kOk, kFailed, kSkipped };

std::string_view to_string(StageStatus s);

struct StageRecord {
  std::string name;
  StageStatus status = StageStatus::kSkipped;
  double elapsed_ms = 0;
  std::vector<std::string> warnings;
  std::vector<Json> dropped;
  Json summary = Json::object();
};

struct BuildReport {
  std::string course_id;
  std::vector<StageRecord> stages;  // always all eight, in pipeline order
  std::string failed_stage;         // empty on success
  std::string error;
  Json segmentation;
  Json topics;
  std::string manifest_sha256;
  std::size_t manifest_bytes = 0;

  bool ok() const { return failed_stage.empty(); }
};

Json to_json(const BuildReport& report);

// Builds the transports used for external clients; tests swap in fakes.
struct ClientFactory {
  std::function<std::unique_ptr<JsonTransport>(const std::string& url)> detector;
  std::function<std::unique_ptr<JsonTransport>(const std::string& url)> llm;
};

ClientFactory http_clients();

inline constexpr std::string_view kManifestFile = "manifest.json";
inline constexpr std::string_view kReportFile = "build_report.json";
inline constexpr std::string_view kAssetDir = "assets";

// Runs every stage and writes the course directory <output>/<course id>:
//   manifest.json, build_report.json, transcript.<srt|vtt>,
//   assets/keyframes/<segment>.<ext>
// The report is written even when a stage fails. Never throws for stage
// failures; the report names the stage instead.
BuildReport run_build(const BuildConfig& config, const ClientFactory& clients = http_clients());

}  // namespace moocaug::serve

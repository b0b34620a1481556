#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "moocaug/common/canonical_json.hpp"
#include "moocaug/manifest/manifest.hpp"
#include "moocaug/serve/config.hpp"
#include "moocaug/serve/pipeline.hpp"
#include "moocaug/serve/server.hpp"

namespace {

using namespace moocaug;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

int cmd_build(const std::string& config_path, const std::vector<std::string>& overrides) {
  serve::BuildConfig config;
  try {
    config = serve::load_config(config_path);
    for (const auto& o : overrides) serve::apply_override(config, o);
    serve::check_complete(config);
  } catch (const serve::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  const auto report = serve::run_build(config);
  const auto dir = config.output / config.course_id;
  for (const auto& s : report.stages) {
    std::cerr << "  " << s.name << ": " << serve::to_string(s.status);
    if (s.status == serve::StageStatus::kOk) std::cerr << " (" << static_cast<long>(s.elapsed_ms) << " ms)";
    if (!s.warnings.empty()) std::cerr << ", " << s.warnings.size() << " warning(s)";
    if (!s.dropped.empty()) std::cerr << ", " << s.dropped.size() << " dropped";
    std::cerr << "\n";
  }
  std::cerr << "report: " << (dir / serve::kReportFile).string() << "\n";
  if (!report.ok()) {
    std::cerr << "build failed in stage " << report.failed_stage << ": " << report.error << "\n";
    return kExitFailed;
  }
  std::cout << (dir / serve::kManifestFile).string() << "\n";
  return kExitOk;
}

int cmd_validate(const std::string& path) {
  std::string bytes;
  if (!read_file(path, bytes)) {
    std::cerr << "cannot read " << path << "\n";
    return kExitUsage;
  }
  const auto report = manifest::validate_manifest(bytes);
  std::cout << canonical_dump(manifest::to_json(report));
  return report.ok() ? kExitOk : kExitFailed;
}

int cmd_inspect(const std::string& path, const std::string& concept_id) {
  std::string bytes;
  if (!read_file(path, bytes)) {
    std::cerr << "cannot read " << path << "\n";
    return kExitUsage;
  }
  Json m;
  try {
    m = Json::parse(bytes);
  } catch (const Json::parse_error& e) {
    std::cerr << "not JSON: " << e.what() << "\n";
    return kExitFailed;
  }
  if (concept_id.empty()) {
    std::cout << "course " << m.value("course_id", "?") << ", " << m.value("duration_ms", 0) / 1000.0 << " s, schema "
              << m.value("schema_version", "?") << "\n";
    std::cout << m["segments"].size() << " segments, " << m["elements"].size() << " elements, "
              << m["concepts"].size() << " concepts, " << m["relationships"].size() << " relationships\n";
    for (const auto& c : m["concepts"]) {
      std::printf("  %-6s %-24s importance %.3f  %-20s %zu mention(s)\n", c.value("id", "").c_str(),
                  c.value("label", "").c_str(), c.value("importance", 0.0), c.value("delivery_style", "").c_str(),
                  c["mentions"].size());
    }
    std::cout << "time nodes:";
    for (const auto& t : m["tracks"]["time_nodes"]) std::cout << " " << t.get<std::int64_t>() / 1000.0 << "s";
    std::cout << "\n";
    return kExitOk;
  }
  Json out;
  for (const auto& c : m["concepts"])
    if (c.value("id", "") == concept_id) out["concept"] = c;
  if (out.is_null()) {
    std::cerr << "no concept " << concept_id << "\n";
    return kExitFailed;
  }
  out["relationships"] = Json::array();
  for (const auto& r : m["relationships"])
    if (r.value("src", "") == concept_id || r.value("dst", "") == concept_id) out["relationships"].push_back(r);
  for (const auto& r : m["paused_layout"]["radial_layouts"])
    if (r.value("concept_id", "") == concept_id) out["radial_layout"] = r;
  for (const auto& s : m["paused_layout"]["stage_assignments"])
    if (s.value("concept_id", "") == concept_id) out["stages"] = s;
  std::cout << canonical_dump(out);
  return kExitOk;
}

serve::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const std::string& root, const std::string& bind) {
  std::pair<std::string, int> addr;
  try {
    addr = serve::parse_bind_address(bind);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }
  serve::Server server(serve::CourseStore::scan(root));
  if (!server.bind(addr.first, addr.second)) {
    std::cerr << "cannot bind " << bind << "\n";
    return kExitFailed;
  }
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  spdlog::info("listening on {}:{}", addr.first, server.port());
  const bool ok = server.run();
  g_server = nullptr;
  return ok ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Builds and serves concept augmentation manifests for lecture videos"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")->capture_default_str();

  std::string config_path;
  std::vector<std::string> overrides;
  auto* build = app.add_subcommand("build", "Run the pipeline for one course");
  build->add_option("--config", config_path, "Course config file")->required()->check(CLI::ExistingFile);
  build->add_option("--set", overrides, "Override a config key (section.key=value)");

  std::string manifest_path;
  auto* validate = app.add_subcommand("validate", "Check a manifest file");
  validate->add_option("manifest", manifest_path)->required();

  std::string concept_id;
  auto* inspect = app.add_subcommand("inspect", "Summarize a manifest");
  inspect->add_option("manifest", manifest_path)->required();
  inspect->add_option("--concept", concept_id, "Show one concept's relationships and layout");

  std::string root;
  std::string bind = "127.0.0.1:8080";
  auto* serve_cmd = app.add_subcommand("serve", "Serve built courses over HTTP");
  serve_cmd->add_option("--root", root, "Directory holding built course directories")->required();
  serve_cmd->add_option("--bind", bind, "host:port")->capture_default_str();

  auto* keys = app.add_subcommand("keys", "List the config keys with their ranges and defaults");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_default_logger(spdlog::stderr_color_mt("moocaug"));
  spdlog::set_level(spdlog::level::from_str(log_level));

  if (*build) return cmd_build(config_path, overrides);
  if (*validate) return cmd_validate(manifest_path);
  if (*inspect) return cmd_inspect(manifest_path, concept_id);
  if (*serve_cmd) return cmd_serve(root, bind);
  if (*keys) {
    for (const auto& k : moocaug::serve::config_keys()) std::cout << k.key << "\t" << k.range << "\t" << k.fallback << "\n";
    return kExitOk;
  }
  return kExitUsage;
}

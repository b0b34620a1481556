#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace moocaug::serve {

// ---- request paths ------------------------------------------------------------

enum class PathVerdict { kOk, kMalformed, kTraversal };

struct PathCheck {
  PathVerdict verdict = PathVerdict::kOk;
  std::vector<std::string> segments;  // decoded, when kOk
  std::string reason;
};

// A course id or asset path segment: [A-Za-z0-9_][A-Za-z0-9._-]*, so no
// empty, dot-leading or separator-bearing segments.
bool is_safe_segment(std::string_view segment);

// Percent-decodes once; nullopt on a broken escape.
std::optional<std::string> percent_decode(std::string_view s);

// Checks a raw (still percent-encoded) request path. Any ".." or backslash
// in the path, at any depth of percent-decoding, is kTraversal; segments that
// are otherwise unsafe are kMalformed. Nothing here touches the filesystem.
PathCheck check_request_path(std::string_view raw_path);

std::string_view content_type_for(const std::filesystem::path& file);

// ---- course store -----------------------------------------------------------------

struct CourseEntry {
  std::string id;
  std::filesystem::path dir;
  std::string manifest;  // bytes as on disk
  std::string etag;      // quoted SHA-256 of the manifest
  std::filesystem::path transcript;
  std::string transcript_type;
};

// Immutable snapshot of the root: every subdirectory holding a manifest that
// validates. Other directories are skipped with a log line.
class CourseStore {
 public:
  static CourseStore scan(const std::filesystem::path& root);

  std::vector<std::string> ids() const;
  const CourseEntry* find(std::string_view id) const;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
  std::map<std::string, CourseEntry, std::less<>> courses_;
};

// ---- HTTP ---------------------------------------------------------------------------

// GET /healthz, /courses, /courses/{id}/manifest, /courses/{id}/transcript,
// /courses/{id}/assets/{path}. Read-only; serves the snapshot taken at
// construction plus asset files read on demand.
class Server {
 public:
  explicit Server(CourseStore store);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and serves until stop(). Port 0 picks a free port; see port().
  bool bind(const std::string& host, int port);
  int port() const;
  bool run();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// "host:port", "host" (port 8080) or ":port" (all interfaces).
std::pair<std::string, int> parse_bind_address(std::string_view addr);

}  // namespace moocaug::serve

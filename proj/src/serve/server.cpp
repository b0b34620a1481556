#include "moocaug/serve/server.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "moocaug/common/canonical_json.hpp"
#include "moocaug/common/digest.hpp"
#include "moocaug/manifest/manifest.hpp"
#include "moocaug/serve/pipeline.hpp"

namespace moocaug::serve {
namespace fs = std::filesystem;

bool is_safe_segment(std::string_view s) {
  if (s.empty()) return false;
  auto word = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  };
  if (!word(s.front())) return false;
  return std::all_of(s.begin(), s.end(), [&](char c) { return word(c) || c == '.' || c == '-'; });
}

std::optional<std::string> percent_decode(std::string_view s) {
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '%') {
      out += s[i];
      continue;
    }
    if (i + 2 >= s.size()) return std::nullopt;
    const int hi = hex(s[i + 1]);
    const int lo = hex(s[i + 2]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out += static_cast<char>(hi * 16 + lo);
    i += 2;
  }
  return out;
}

namespace {

bool has_traversal_token(std::string_view s) {
  return s.find("..") != std::string_view::npos || s.find('\\') != std::string_view::npos ||
         s.find('\0') != std::string_view::npos;
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t start = 1;  // past the leading '/'
  while (start <= path.size()) {
    const auto slash = path.find('/', start);
    const auto end = slash == std::string_view::npos ? path.size() : slash;
    out.emplace_back(path.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

}  // namespace

PathCheck check_request_path(std::string_view raw) {
  PathCheck out;
  // Every layer of encoding is inspected, so %252e%252e cannot slip through.
  std::string layer(raw);
  for (int depth = 0; depth < 4; ++depth) {
    if (has_traversal_token(layer)) {
      out.verdict = PathVerdict::kTraversal;
      out.reason = "parent-directory token";
      return out;
    }
    if (layer.find('%') == std::string::npos) break;
    auto next = percent_decode(layer);
    if (!next) {
      out.verdict = PathVerdict::kMalformed;
      out.reason = "broken percent escape";
      return out;
    }
    layer = std::move(*next);
  }
  if (has_traversal_token(layer)) {
    out.verdict = PathVerdict::kTraversal;
    out.reason = "parent-directory token";
    return out;
  }
  if (raw.empty() || raw.front() != '/') {
    out.verdict = PathVerdict::kMalformed;
    out.reason = "path must be absolute";
    return out;
  }
  if (raw == "/") return out;
  const auto decoded = percent_decode(raw);
  for (auto& seg : split_path(*decoded)) {
    if (!is_safe_segment(seg)) {
      out.verdict = PathVerdict::kMalformed;
      out.reason = "unsafe path segment \"" + seg + "\"";
      out.segments.clear();
      return out;
    }
    out.segments.push_back(std::move(seg));
  }
  return out;
}

std::string_view content_type_for(const fs::path& file) {
  static const std::map<std::string, std::string_view, std::less<>> types = {
      {".json", "application/json"},
      {".pgm", "image/x-portable-graymap"},
      {".ppm", "image/x-portable-pixmap"},
      {".pnm", "image/x-portable-anymap"},
      {".png", "image/png"},
      {".jpg", "image/jpeg"},
      {".jpeg", "image/jpeg"},
      {".webp", "image/webp"},
      {".mp4", "video/mp4"},
      {".webm", "video/webm"},
      {".srt", "application/x-subrip; charset=utf-8"},
      {".vtt", "text/vtt; charset=utf-8"},
      {".txt", "text/plain; charset=utf-8"},
  };
  auto ext = file.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const auto it = types.find(ext);
  return it == types.end() ? std::string_view("application/octet-stream") : it->second;
}

namespace {

std::optional<std::string> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

CourseStore CourseStore::scan(const fs::path& root) {
  CourseStore store;
  store.root_ = root;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    spdlog::warn("course root {} is not a directory", root.string());
    return store;
  }
  for (const auto& entry : fs::directory_iterator(root, ec)) {
    if (!entry.is_directory()) continue;
    const auto id = entry.path().filename().string();
    if (!is_safe_segment(id)) continue;
    const auto bytes = slurp(entry.path() / kManifestFile);
    if (!bytes) continue;
    const auto report = manifest::validate_manifest(*bytes);
    if (!report.ok()) {
      spdlog::warn("skipping course {}: manifest has {} violation(s), first at {}", id, report.violations.size(),
                   report.violations.front().path);
      continue;
    }
    if (Json::parse(*bytes).value("course_id", std::string()) != id) {
      spdlog::warn("skipping course {}: manifest names a different course id", id);
      continue;
    }
    CourseEntry c;
    c.id = id;
    c.dir = entry.path();
    c.manifest = *bytes;
    c.etag = "\"" + sha256_hex(*bytes) + "\"";
    for (const auto* name : {"transcript.srt", "transcript.vtt"}) {
      if (fs::is_regular_file(entry.path() / name)) {
        c.transcript = entry.path() / name;
        c.transcript_type = std::string(content_type_for(c.transcript));
        break;
      }
    }
    spdlog::info("serving course {} ({} manifest bytes)", id, bytes->size());
    store.courses_.emplace(id, std::move(c));
  }
  return store;
}

std::vector<std::string> CourseStore::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, c] : courses_) out.push_back(id);
  return out;
}

const CourseEntry* CourseStore::find(std::string_view id) const {
  const auto it = courses_.find(id);
  return it == courses_.end() ? nullptr : &it->second;
}

struct Server::Impl {
  CourseStore store;
  httplib::Server http;
  int port = -1;
  std::string host;

  explicit Impl(CourseStore s) : store(std::move(s)) {
    http.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
      const auto raw = std::string_view(req.target).substr(0, req.target.find('?'));
      const auto check = check_request_path(raw);
      if (check.verdict == PathVerdict::kOk) return httplib::Server::HandlerResponse::Unhandled;
      if (check.verdict == PathVerdict::kTraversal) {
        spdlog::warn("rejected traversal attempt from {}: {}", req.remote_addr, req.target);
      } else {
        spdlog::info("rejected malformed path {}: {}", req.target, check.reason);
      }
      res.status = 400;
      res.set_content(check.reason + "\n", "text/plain");
      return httplib::Server::HandlerResponse::Handled;
    });

    http.Get("/healthz", [](const httplib::Request&, httplib::Response& res) { res.set_content("ok", "text/plain"); });

    http.Get("/courses", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(canonical_dump(Json(store.ids())), "application/json");
    });

    http.Get(R"(/courses/([^/]+)/manifest)", [this](const httplib::Request& req, httplib::Response& res) {
      const auto* c = course(req, res);
      if (c == nullptr) return;
      res.set_header("ETag", c->etag);
      res.set_header("Cache-Control", "no-cache");
      const auto inm = req.get_header_value("If-None-Match");
      if (!inm.empty() && (inm == "*" || inm.find(c->etag) != std::string::npos)) {
        res.status = 304;
        return;
      }
      res.set_content(c->manifest, "application/json");
    });

    http.Get(R"(/courses/([^/]+)/transcript)", [this](const httplib::Request& req, httplib::Response& res) {
      const auto* c = course(req, res);
      if (c == nullptr) return;
      const auto body = c->transcript.empty() ? std::nullopt : slurp(c->transcript);
      if (!body) return not_found(res, "no transcript");
      res.set_content(*body, c->transcript_type);
    });

    http.Get(R"(/courses/([^/]+)/assets/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
      const auto* c = course(req, res);
      if (c == nullptr) return;
      // The pre-routing check already vetted every segment.
      const auto assets = c->dir / kAssetDir;
      fs::path file = assets;
      const auto segments = check_request_path(req.target.substr(0, req.target.find('?'))).segments;
      for (std::size_t i = 3; i < segments.size(); ++i) file /= segments[i];
      std::error_code ec;
      const auto real = fs::weakly_canonical(file, ec);
      const auto real_root = fs::weakly_canonical(assets, ec);
      const auto rel = real.lexically_relative(real_root);
      if (ec || rel.empty() || *rel.begin() == ".." || !fs::is_regular_file(real, ec)) return not_found(res, "no such asset");
      const auto body = slurp(real);
      if (!body) return not_found(res, "no such asset");
      res.set_content(*body, std::string(content_type_for(real)));
    });

    http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) res.set_content(std::to_string(res.status) + "\n", "text/plain");
    });
    http.set_logger([](const httplib::Request& req, const httplib::Response& res) {
      spdlog::debug("{} {} -> {}", req.method, req.target, res.status);
    });
  }

  const CourseEntry* course(const httplib::Request& req, httplib::Response& res) const {
    const auto* c = store.find(req.matches[1].str());
    if (c == nullptr) not_found(res, "unknown course");
    return c;
  }

  static void not_found(httplib::Response& res, const std::string& why) {
    res.status = 404;
    res.set_content(why + "\n", "text/plain");
  }
};

Server::Server(CourseStore store) : impl_(std::make_unique<Impl>(std::move(store))) {}
Server::~Server() { stop(); }

bool Server::bind(const std::string& host, int port) {
  impl_->host = host;
  if (port == 0) {
    impl_->port = impl_->http.bind_to_any_port(host);
  } else {
    impl_->port = impl_->http.bind_to_port(host, port) ? port : -1;
  }
  return impl_->port > 0;
}

int Server::port() const { return impl_->port; }

bool Server::run() { return impl_->http.listen_after_bind(); }

void Server::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

std::pair<std::string, int> parse_bind_address(std::string_view addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string_view::npos) return {std::string(addr), 8080};
  std::string host(addr.substr(0, colon));
  if (host.empty()) host = "0.0.0.0";
  const auto port_text = std::string(addr.substr(colon + 1));
  int port = -1;
  try {
    std::size_t used = 0;
    port = std::stoi(port_text, &used);
    if (used != port_text.size()) port = -1;
  } catch (const std::exception&) {
    port = -1;
  }
  if (port < 0 || port > 65535) throw Error("bad bind address: " + std::string(addr));
  return {host, port};
}

}  // namespace moocaug::serve

#include <cstdlib>
#include <future>
#include <map>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "moocaug/common/digest.hpp"
#include "moocaug/ingest/frames.hpp"
#include "moocaug/manifest/manifest.hpp"
#include "moocaug/serve/config.hpp"
#include "moocaug/serve/pipeline.hpp"
#include "moocaug/serve/server.hpp"
#include "test_support.hpp"

namespace moocaug::serve {
namespace {

namespace fs = std::filesystem;
using testing::read_file;
using testing::TempDir;
using testing::write_file;

// ---- config -------------------------------------------------------------------

constexpr const char* kMinimalIni = R"(
[course]
id = demo
[paths]
subtitles = talk.srt
frames = frames
output = out
)";

TEST(Config, ResolvesPathsAgainstTheConfigDirectory) {
  const auto c = parse_config(kMinimalIni, "/srv/course");
  EXPECT_EQ(c.course_id, "demo");
  EXPECT_EQ(c.subtitles, fs::path("/srv/course/talk.srt"));
  EXPECT_EQ(c.frames, fs::path("/srv/course/frames"));
  EXPECT_TRUE(c.annotations.empty());
  EXPECT_NO_THROW(check_complete(c));
}

TEST(Config, DefaultsMatchTheKeyTable) {
  const auto c = parse_config(kMinimalIni, "/x");
  EXPECT_DOUBLE_EQ(c.segmentation.theta_emd, 0.15);
  EXPECT_DOUBLE_EQ(c.segmentation.theta_edge, 0.3);
  EXPECT_DOUBLE_EQ(c.textrank.damping, 0.85);
  EXPECT_EQ(c.keyphrases.max_concepts, 15u);
  EXPECT_DOUBLE_EQ(c.layout.r_min, 0.35);
  EXPECT_EQ(c.interaction.focus_dwell_ms, 3000);
  EXPECT_EQ(c.seed, 1u);
}

TEST(Config, ValuesAndComments) {
  const auto c = parse_config(std::string(kMinimalIni) + R"(
; comment
# another
[slideseg]
theta_emd = 0.25
[layout]
r_min = 0.5
follow_ms = 1000
[detector]
required = true
)",
                              "/x");
  EXPECT_DOUBLE_EQ(c.segmentation.theta_emd, 0.25);
  EXPECT_DOUBLE_EQ(c.layout.r_min, 0.5);
  EXPECT_EQ(c.interaction.follow_ms, 1000);
  EXPECT_TRUE(c.detector_required);
}

ConfigErrc parse_error(const std::string& text) {
  try {
    parse_config(text, "/x");
  } catch (const ConfigError& e) {
    return e.code();
  }
  ADD_FAILURE() << "accepted:\n" << text;
  return ConfigErrc::kSyntax;
}

TEST(Config, RejectsBadInput) {
  const std::string base = kMinimalIni;
  EXPECT_EQ(parse_error(base + "[slideseg]\nthta_emd = 1\n"), ConfigErrc::kUnknownKey);
  EXPECT_EQ(parse_error(base + "[nosuch]\nkey = 1\n"), ConfigErrc::kUnknownKey);
  EXPECT_EQ(parse_error(base + "[slideseg]\ntheta_emd = fast\n"), ConfigErrc::kBadValue);
  EXPECT_EQ(parse_error(base + "[slideseg]\ntheta_emd = 0.1x\n"), ConfigErrc::kBadValue);
  EXPECT_EQ(parse_error(base + "[slideseg]\ntheta_emd = 0\n"), ConfigErrc::kOutOfRange);
  EXPECT_EQ(parse_error(base + "[concepts]\ndamping = 1\n"), ConfigErrc::kOutOfRange);
  EXPECT_EQ(parse_error(base + "[concepts]\nmax_concepts = 0\n"), ConfigErrc::kOutOfRange);
  EXPECT_EQ(parse_error(base + "[layout]\nr_min = 0.9\nr_max = 0.5\n"), ConfigErrc::kOutOfRange);
  EXPECT_EQ(parse_error(base + "[detector]\nrequired = maybe\n"), ConfigErrc::kBadValue);
  EXPECT_EQ(parse_error(base + "[detector]\nurl = ftp://host\n"), ConfigErrc::kBadValue);
  EXPECT_EQ(parse_error("[course]\nid = ../up\n"), ConfigErrc::kBadValue);
  EXPECT_EQ(parse_error("[course\nid = a\n"), ConfigErrc::kSyntax);
  EXPECT_EQ(parse_error("[course]\nid = a\nid = b\n"), ConfigErrc::kSyntax);
}

TEST(Config, MissingRequiredKeys) {
  auto c = parse_config("[course]\nid = a\n", "/x");
  try {
    check_complete(c);
    FAIL() << "incomplete config accepted";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.code(), ConfigErrc::kMissingKey);
    EXPECT_NE(std::string(e.what()).find("paths.subtitles"), std::string::npos);
  }
  // An extractor stands in for paths.frames.
  c = parse_config("[course]\nid = a\n[paths]\nsubtitles = s.srt\noutput = o\n[frames]\nextractor = true\n", "/x");
  EXPECT_NO_THROW(check_complete(c));
}

TEST(Config, OverridesAndEnvironment) {
  auto c = parse_config(kMinimalIni, "/x");
  apply_override(c, "slideseg.theta_edge=0.5");
  apply_override(c, "course.seed = 42");
  EXPECT_DOUBLE_EQ(c.segmentation.theta_edge, 0.5);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_THROW(apply_override(c, "slideseg.theta_edge"), ConfigError);
  EXPECT_THROW(apply_override(c, "nosuch.key=1"), ConfigError);

  ::setenv(std::string(kLlmUrlEnv).c_str(), "http://127.0.0.1:9", 1);
  ::setenv(std::string(kDetectorUrlEnv).c_str(), "", 1);
  c.detector_url = "http://detector";
  apply_environment(c);
  EXPECT_EQ(c.llm_url, "http://127.0.0.1:9");
  EXPECT_FALSE(c.detector_url.has_value());
  ::unsetenv(std::string(kLlmUrlEnv).c_str());
  ::unsetenv(std::string(kDetectorUrlEnv).c_str());
}

TEST(Config, KeyTableCoversEveryParsedKey) {
  // Every documented key must be accepted with its documented default.
  for (const auto& k : config_keys()) {
    if (k.fallback.empty() || k.fallback.front() == '(' || k.fallback == "50 / K") continue;
    auto c = parse_config(kMinimalIni, "/x");
    EXPECT_NO_THROW(apply_override(c, k.key + "=" + k.fallback)) << k.key;
  }
}

// ---- request paths ------------------------------------------------------------

TEST(RequestPath, AcceptsOrdinaryPaths) {
  for (const char* p : {"/", "/healthz", "/courses", "/courses/fundamental-charts/manifest",
                        "/courses/c_1/assets/keyframes/0003.pgm", "/courses/a/assets/x%2Dy"}) {
    const auto check = check_request_path(p);
    EXPECT_EQ(check.verdict, PathVerdict::kOk) << p << ": " << check.reason;
  }
  const auto check = check_request_path("/courses/a/assets/keyframes/0001.pgm");
  EXPECT_EQ(check.segments, (std::vector<std::string>{"courses", "a", "assets", "keyframes", "0001.pgm"}));
}

TEST(RequestPath, TraversalCorpus) {
  for (const char* p : {"/courses/../etc/passwd", "/courses/a/assets/../../manifest.json", "/..", "/courses/..",
                        "/courses/a/assets/%2e%2e/%2e%2e/x", "/courses/a/assets/%2E%2E%2Fx", "/courses/a/assets/.%2e/x",
                        "/courses/a/assets/%252e%252e/x", "/courses/a/assets/%25252e%25252e/x",
                        "/courses/a/assets/..%5c..%5cx", "/courses/a/assets/%5c", "/courses/a\\b", "/courses/a/x%00.pgm",
                        "/courses/a/assets/...", "/courses/a/assets/a..b"}) {
    EXPECT_EQ(check_request_path(p).verdict, PathVerdict::kTraversal) << p;
  }
}

TEST(RequestPath, MalformedCorpus) {
  for (const char* p : {"", "courses", "//etc/passwd", "/courses//a", "/courses/a/", "/courses/.hidden",
                        "/courses/a/assets/.", "/courses/a/assets/%2e", "/courses/a/%zz", "/courses/a/%4",
                        "/courses/a/assets/%2fetc", "/courses/a/b%3Fc", "/courses/-a"}) {
    EXPECT_EQ(check_request_path(p).verdict, PathVerdict::kMalformed) << p;
  }
}

TEST(RequestPath, SafeSegmentRule) {
  EXPECT_TRUE(is_safe_segment("a"));
  EXPECT_TRUE(is_safe_segment("0001.pgm"));
  EXPECT_TRUE(is_safe_segment("course_1-b.v2"));
  EXPECT_FALSE(is_safe_segment(""));
  EXPECT_FALSE(is_safe_segment("."));
  EXPECT_FALSE(is_safe_segment(".x"));
  EXPECT_FALSE(is_safe_segment("-x"));
  EXPECT_FALSE(is_safe_segment("a/b"));
  EXPECT_FALSE(is_safe_segment("a b"));
}

TEST(RequestPath, PercentDecode) {
  EXPECT_EQ(percent_decode("a%20b%2F"), "a b/");
  EXPECT_EQ(percent_decode("%252e"), "%2e");
  EXPECT_FALSE(percent_decode("%").has_value());
  EXPECT_FALSE(percent_decode("%2").has_value());
  EXPECT_FALSE(percent_decode("%g0").has_value());
}

TEST(BindAddress, Forms) {
  EXPECT_EQ(parse_bind_address("127.0.0.1:9000"), (std::pair<std::string, int>{"127.0.0.1", 9000}));
  EXPECT_EQ(parse_bind_address("localhost"), (std::pair<std::string, int>{"localhost", 8080}));
  EXPECT_EQ(parse_bind_address(":0"), (std::pair<std::string, int>{"0.0.0.0", 0}));
  EXPECT_THROW(parse_bind_address("h:70000"), Error);
  EXPECT_THROW(parse_bind_address("h:80x"), Error);
}

// ---- pipeline -------------------------------------------------------------------

// Three visually distinct slides, twelve one-second frames each.
void write_frames(const fs::path& dir) {
  fs::create_directories(dir);
  for (int t = 0; t < 36; ++t) {
    ingest::GrayImage img;
    img.width = 64;
    img.height = 36;
    img.pixels.assign(64 * 36, 0);
    const int slide = t / 12;
    for (int y = 0; y < 36; ++y)
      for (int x = 0; x < 64; ++x) {
        std::uint8_t v = 0;
        if (slide == 0) v = (x > 20 && x < 44 && y > 10 && y < 26) ? 40 : 220;
        if (slide == 1) v = (y % 6 < 2) ? 30 : 170;
        if (slide == 2) v = ((x / 4 + y / 4) % 2) ? 90 : 120;
        img.pixels[static_cast<std::size_t>(y * 64 + x)] = v;
      }
    char name[32];
    std::snprintf(name, sizeof name, "%06d.pgm", t);
    write_file(dir / name, ingest::encode_pgm(img));
  }
}

constexpr const char* kTalk = R"(1
00:00:00,000 --> 00:00:04,000
Today we meet the bar graph and the pie chart.

2
00:00:04,000 --> 00:00:08,000
A bar graph shows one bar for each category.

3
00:00:08,000 --> 00:00:12,000
The bar graph makes categories easy to compare.

4
00:00:12,000 --> 00:00:16,000
A pie chart splits the whole into slices.

5
00:00:16,000 --> 00:00:20,000
Each slice of the pie chart is one category.

6
00:00:20,000 --> 00:00:24,000
The pie chart and the bar graph both show categories.

7
00:00:24,000 --> 00:00:28,000
A histogram groups numbers into bins.

8
00:00:28,000 --> 00:00:32,000
Each bin of the histogram becomes a bar.

9
00:00:32,000 --> 00:00:36,000
Unlike a bar graph, the histogram bars touch.
)";

struct SmallCourse {
  TempDir dir{"serve"};
  BuildConfig config;

  SmallCourse() {
    write_frames(dir.path() / "frames");
    write_file(dir.path() / "talk.srt", kTalk);
    write_file(dir.path() / "course.ini", std::string(kMinimalIni) + "[structure]\niterations = 50\n");
    config = load_config(dir.path() / "course.ini");
  }
  fs::path course_dir() const { return config.output / config.course_id; }
};

// The build must not depend on any service in the environment.
ClientFactory no_clients() {
  return {[](const std::string&) -> std::unique_ptr<JsonTransport> { return nullptr; },
          [](const std::string&) -> std::unique_ptr<JsonTransport> { return nullptr; }};
}

TEST(Pipeline, SmallCourseBuildsAndValidates) {
  SmallCourse course;
  const auto report = run_build(course.config, no_clients());
  ASSERT_TRUE(report.ok()) << report.failed_stage << ": " << report.error;
  ASSERT_EQ(report.stages.size(), kStageNames.size());
  for (std::size_t i = 0; i < kStageNames.size(); ++i) {
    EXPECT_EQ(report.stages[i].name, kStageNames[i]);
    EXPECT_EQ(report.stages[i].status, StageStatus::kOk) << report.stages[i].name;
  }
  const auto manifest_bytes = read_file(course.course_dir() / kManifestFile);
  EXPECT_EQ(report.manifest_sha256, sha256_hex(manifest_bytes));
  EXPECT_EQ(report.manifest_bytes, manifest_bytes.size());
  EXPECT_TRUE(manifest::validate_manifest(manifest_bytes).ok());

  const auto m = Json::parse(manifest_bytes);
  EXPECT_EQ(m["course_id"], "demo");
  EXPECT_EQ(m["segments"].size(), 3u);
  std::vector<std::string> labels;
  for (const auto& c : m["concepts"]) labels.push_back(c["label"]);
  for (const char* want : {"bar graph", "pie chart", "histogram"}) {
    EXPECT_NE(std::find(labels.begin(), labels.end(), want), labels.end()) << want;
  }
  EXPECT_TRUE(fs::is_regular_file(course.course_dir() / "transcript.srt"));
  for (std::size_t i = 0; i < 3; ++i) {
    bool found = false;
    for (const auto& e : fs::directory_iterator(course.course_dir() / kAssetDir / "keyframes")) {
      found |= e.path().stem() == std::to_string(i);
    }
    EXPECT_TRUE(found) << "keyframe " << i;
  }
  const auto saved = Json::parse(read_file(course.course_dir() / kReportFile));
  EXPECT_EQ(saved["failed_stage"], nullptr);
}

TEST(Pipeline, RebuildIsByteIdentical) {
  SmallCourse course;
  ASSERT_TRUE(run_build(course.config, no_clients()).ok());
  const auto first = read_file(course.course_dir() / kManifestFile);
  ASSERT_TRUE(run_build(course.config, no_clients()).ok());
  EXPECT_EQ(read_file(course.course_dir() / kManifestFile), first);
}

TEST(Pipeline, MissingSubtitlesFailsAtIngest) {
  SmallCourse course;
  fs::remove(course.dir.path() / "talk.srt");
  const auto report = run_build(course.config, no_clients());
  EXPECT_FALSE(report.ok());
  EXPECT_EQ(report.failed_stage, "ingest");
  EXPECT_NE(report.error.find("talk.srt"), std::string::npos) << report.error;
  EXPECT_EQ(report.stages[0].status, StageStatus::kFailed);
  for (std::size_t i = 1; i < report.stages.size(); ++i) EXPECT_EQ(report.stages[i].status, StageStatus::kSkipped);
  EXPECT_FALSE(fs::exists(course.course_dir() / kManifestFile));
  const auto saved = Json::parse(read_file(course.course_dir() / kReportFile));
  EXPECT_EQ(saved["failed_stage"], "ingest");
}

TEST(Pipeline, UnreachableDetectorIsAWarningUnlessRequired) {
  SmallCourse course;
  course.config.detector_url = "http://127.0.0.1:1";
  auto clients = no_clients();
  clients.detector = [](const std::string&) -> std::unique_ptr<JsonTransport> {
    struct Down : JsonTransport {
      Json post(const std::string&, const Json&) override {
        throw TransportError(TransportErrc::kUnreachable, "connection refused");
      }
    };
    return std::make_unique<Down>();
  };
  auto report = run_build(course.config, clients);
  ASSERT_TRUE(report.ok()) << report.error;
  EXPECT_FALSE(report.stages[2].warnings.empty());

  course.config.detector_required = true;
  report = run_build(course.config, clients);
  EXPECT_EQ(report.failed_stage, "elements");
}

TEST(Pipeline, LlmProposalsJoinTheGraph) {
  SmallCourse course;
  course.config.llm_url = "http://llm";
  auto clients = no_clients();
  clients.llm = [](const std::string&) -> std::unique_ptr<JsonTransport> {
    struct Fake : JsonTransport {
      Json post(const std::string&, const Json&) override {
        return {{"text",
                 R"([{"src_label": "pie chart", "dst_label": "histogram", "kind": "Association", "confidence": 0.9}])"}};
      }
    };
    return std::make_unique<Fake>();
  };
  const auto report = run_build(course.config, clients);
  ASSERT_TRUE(report.ok()) << report.error;
  const auto m = Json::parse(read_file(course.course_dir() / kManifestFile));
  std::map<std::string, std::string> id_of;
  for (const auto& c : m["concepts"]) id_of[c["label"]] = c["id"];
  auto [lo, hi] = std::minmax(id_of["pie chart"], id_of["histogram"]);
  bool found = false;
  for (const auto& r : m["relationships"]) {
    if (r["kind"] != "Association" || r["src"] != lo || r["dst"] != hi) continue;
    for (const auto& e : r["evidence"]) found |= e["source"] == "LLM";
  }
  EXPECT_TRUE(found) << to_json(report)["stages"][4].dump();
}

// ---- HTTP -----------------------------------------------------------------------

class ServerTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    course_ = new SmallCourse();
    const auto report = run_build(course_->config, no_clients());
    ASSERT_TRUE(report.ok()) << report.error;
    // A directory with an invalid manifest must not be served.
    fs::create_directories(course_->config.output / "broken");
    write_file(course_->config.output / "broken" / kManifestFile, "{\"course_id\": \"broken\"}");
    // A valid manifest filed under another course's name must not be served either.
    fs::create_directories(course_->config.output / "renamed");
    fs::copy_file(course_->course_dir() / kManifestFile, course_->config.output / "renamed" / kManifestFile);
    // A file outside the assets tree that traversal would reach.
    write_file(course_->config.output / "secret.txt", "secret");
  }
  static void TearDownTestSuite() {
    delete course_;
    course_ = nullptr;
  }

  void SetUp() override {
    server_ = std::make_unique<Server>(CourseStore::scan(course_->config.output));
    ASSERT_TRUE(server_->bind("127.0.0.1", 0));
    thread_ = std::thread([this] { server_->run(); });
    server_->wait_until_ready();
  }
  void TearDown() override {
    server_->stop();
    thread_.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", server_->port());
    c.set_url_encode(false);
    return c;
  }

  static fs::path course_dir() { return course_->course_dir(); }

  static SmallCourse* course_;
  std::unique_ptr<Server> server_;
  std::thread thread_;
};

SmallCourse* ServerTest::course_ = nullptr;

TEST_F(ServerTest, Healthz) {
  const auto res = client().Get("/healthz");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->body, "ok");
}

TEST_F(ServerTest, ListsOnlyValidCourses) {
  const auto res = client().Get("/courses");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(Json::parse(res->body), Json::array({"demo"}));
  EXPECT_EQ(res->get_header_value("Content-Type"), "application/json");
}

TEST_F(ServerTest, ManifestBytesAndEtag) {
  const auto on_disk = read_file(course_dir() / kManifestFile);
  auto c = client();
  const auto res = c.Get("/courses/demo/manifest");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->body, on_disk);
  const auto etag = res->get_header_value("ETag");
  EXPECT_EQ(etag, "\"" + sha256_hex(on_disk) + "\"");

  const auto again = c.Get("/courses/demo/manifest", {{"If-None-Match", etag}});
  ASSERT_TRUE(again);
  EXPECT_EQ(again->status, 304);
  EXPECT_TRUE(again->body.empty());

  const auto stale = c.Get("/courses/demo/manifest", {{"If-None-Match", "\"0000\""}});
  ASSERT_TRUE(stale);
  EXPECT_EQ(stale->status, 200);
}

TEST_F(ServerTest, TranscriptAndAssets) {
  auto c = client();
  const auto t = c.Get("/courses/demo/transcript");
  ASSERT_TRUE(t);
  EXPECT_EQ(t->status, 200);
  EXPECT_EQ(t->body, read_file(course_dir() / "transcript.srt"));
  EXPECT_EQ(t->get_header_value("Content-Type"), "application/x-subrip; charset=utf-8");

  const auto m = Json::parse(read_file(course_dir() / kManifestFile));
  // Keyframe references in the manifest are relative to the assets root.
  std::string key;
  for (const auto& e : fs::directory_iterator(course_dir() / kAssetDir / "keyframes")) {
    key = "keyframes/" + e.path().filename().string();
    break;
  }
  ASSERT_FALSE(key.empty());
  const auto a = c.Get("/courses/demo/assets/" + key);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->status, 200);
  EXPECT_EQ(a->body, read_file(course_dir() / kAssetDir / key));
  EXPECT_EQ(a->get_header_value("Content-Type"), std::string(content_type_for(key)));
}

TEST_F(ServerTest, NotFound) {
  auto c = client();
  for (const char* p : {"/courses/nosuch/manifest", "/courses/broken/manifest", "/courses/demo/assets/nosuch.pgm",
                        "/courses/demo/assets/keyframes", "/courses/demo/other", "/nothing"}) {
    const auto res = c.Get(p);
    ASSERT_TRUE(res) << p;
    EXPECT_EQ(res->status, 404) << p;
  }
}

// Recursive listing with contents, to prove requests never write.
std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    out[e.path().lexically_relative(root).string()] = e.is_regular_file() ? sha256_hex(read_file(e.path())) : "dir";
  }
  return out;
}

TEST_F(ServerTest, TraversalIsRejectedWithoutSideEffects) {
  const auto before = snapshot(course_->dir.path());
  auto c = client();
  for (const char* p : {"/courses/demo/assets/../manifest.json", "/courses/demo/assets/../../secret.txt",
                        "/courses/demo/assets/%2e%2e/%2e%2e/secret.txt", "/courses/demo/assets/%252e%252e/secret.txt",
                        "/courses/demo/assets/..%2f..%2fsecret.txt", "/courses/demo/assets/..%5c..%5csecret.txt",
                        "/courses/..%2fsecret.txt/manifest", "/courses/demo/assets/x%00.pgm",
                        "/courses/demo/assets//etc/passwd", "/courses/.demo/manifest", "/courses/demo/assets/%zz"}) {
    const auto res = c.Get(p);
    ASSERT_TRUE(res) << p;
    EXPECT_EQ(res->status, 400) << p;
    EXPECT_EQ(res->body.find("secret"), std::string::npos) << p;
  }
  EXPECT_EQ(snapshot(course_->dir.path()), before);
}

TEST_F(ServerTest, ConcurrentReadsAgree) {
  constexpr int kClients = 16;
  std::vector<std::future<std::string>> results;
  for (int i = 0; i < kClients; ++i) {
    results.push_back(std::async(std::launch::async, [this] {
      const auto res = client().Get("/courses/demo/manifest");
      return res && res->status == 200 ? res->body : std::string();
    }));
  }
  const auto expected = read_file(course_dir() / kManifestFile);
  for (auto& r : results) EXPECT_EQ(r.get(), expected);
}

TEST(CourseStore, SkipsInvalidAndMismatchedCourses) {
  TempDir root("store");
  fs::create_directories(root.path() / "empty");
  fs::create_directories(root.path() / "junk");
  write_file(root.path() / "junk" / kManifestFile, "not json");
  const auto store = CourseStore::scan(root.path());
  EXPECT_TRUE(store.ids().empty());
  EXPECT_TRUE(CourseStore::scan(root.path() / "missing").ids().empty());
}

}  // namespace
}  // namespace moocaug::serve

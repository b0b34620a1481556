// Acceptance run: one line per criterion, "PASS" or "FAIL", with the
// tolerance it was held to and the measured value. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <spdlog/spdlog.h>
#include <sys/wait.h>
#include <unistd.h>

#include "moocaug/common/digest.hpp"
#include "moocaug/concepts/concepts.hpp"
#include "moocaug/layout/layout.hpp"
#include "moocaug/manifest/manifest.hpp"
#include "moocaug/manifest/state_machine.hpp"
#include "moocaug/relations/relations.hpp"
#include "moocaug/serve/pipeline.hpp"
#include "moocaug/serve/server.hpp"
#include "moocaug/slideseg/emd.hpp"
#include "moocaug/slideseg/segmentation.hpp"
#include "moocaug/structure/structure.hpp"
#include "oracles.hpp"
#include "planted_graphs.hpp"
#include "state_oracle.hpp"
#include "synthetic_corpus.hpp"
#include "synthetic_slides.hpp"
#include "test_support.hpp"

namespace {

using namespace moocaug;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failures; the first few are kept for the report line.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) notes_.push_back(what);
  }
  Outcome outcome(std::string measured) const {
    if (failures_ == 0) return {true, std::move(measured)};
    std::ostringstream os;
    os << failures_ << " failure(s): ";
    for (std::size_t i = 0; i < notes_.size(); ++i) os << (i ? "; " : "") << notes_[i];
    if (!measured.empty()) os << " | " << measured;
    return {false, os.str()};
  }

 private:
  int failures_ = 0;
  std::vector<std::string> notes_;
};

std::string num(double v, int precision = 3) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

// ---- criteria ------------------------------------------------------------------

Outcome emd_correctness() {
  Check c;
  std::mt19937_64 rng(20241);
  const auto d = slideseg::linear_ground_distance(8);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto a = testing::random_histogram(rng, 8);
    const auto b = testing::random_histogram(rng, 8);
    const double diff = std::abs(slideseg::emd_1d(a, b) - slideseg::emd_transport(a, b, d));
    worst = std::max(worst, diff);
    c.expect(diff <= 1e-9, "pair " + std::to_string(i) + " differs by " + num(diff));
  }
  for (int i = 0; i < 1000; ++i) {
    const auto a = testing::random_histogram(rng, 8);
    const auto b = testing::random_histogram(rng, 8);
    const auto x = testing::random_histogram(rng, 8);
    const double ab = slideseg::emd_1d(a, b), ba = slideseg::emd_1d(b, a);
    c.expect(slideseg::emd_1d(a, a) == 0, "identity");
    c.expect(ab == ba, "symmetry");
    c.expect(ab > 0, "positivity");
    c.expect(slideseg::emd_1d(a, x) <= ab + slideseg::emd_1d(b, x) + 1e-12, "triangle inequality");
  }
  return c.outcome("max |emd_1d - transport| = " + num(worst));
}

Outcome segmentation_precision_recall() {
  Check c;
  const auto lecture = testing::ten_slide_lecture();
  const auto seg = slideseg::segment_slides(lecture.series, lecture.duration_ms);
  std::set<std::int64_t> found;
  for (std::size_t i = 1; i < seg.segments.size(); ++i) found.insert(seg.segments[i].start_ms);
  const std::set<std::int64_t> truth(lecture.change_points_ms.begin(), lecture.change_points_ms.end());
  std::size_t hits = 0;
  for (const auto t : found) hits += truth.count(t);
  const double precision = found.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(found.size());
  const double recall = truth.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(truth.size());
  c.expect(precision == 1.0, "precision " + num(precision));
  c.expect(recall == 1.0, "recall " + num(recall));
  for (const auto t : lecture.illumination_ms) c.expect(!found.count(t), "illumination jump at " + std::to_string(t));
  return c.outcome("P = " + num(precision) + ", R = " + num(recall) + " over " + std::to_string(truth.size()) +
                   " changes, " + std::to_string(lecture.illumination_ms.size()) + " illumination jumps rejected");
}

Outcome textrank_oracle() {
  Check c;
  std::vector<std::string> tokens;
  for (const auto& line :
       parse_word_list(testing::read_file(testing::fixture_path("concepts/thirty_tokens.txt")))) {
    for (auto& w : split_words(line)) tokens.push_back(w);
  }
  c.expect(tokens.size() == 30, "fixture has " + std::to_string(tokens.size()) + " tokens");
  const auto r = concepts::textrank({tokens});
  const auto oracle = testing::textrank_dense_power_iteration(tokens, 4, 0.85);
  double worst = 0;
  c.expect(r.terms.size() == oracle.size(), "term count");
  for (const auto& t : r.terms) {
    const auto it = oracle.find(t.term);
    if (it == oracle.end()) {
      c.expect(false, "unknown term " + t.term);
      continue;
    }
    worst = std::max(worst, std::abs(t.score - it->second));
  }
  c.expect(worst <= 1e-6, "max deviation " + num(worst));
  const auto single = concepts::textrank({{"chart"}});
  c.expect(single.terms.size() == 1 && single.terms[0].score == 1 - 0.85, "single term scores 1 - d");
  const auto pair = concepts::textrank({{"bar", "graph", "bar", "graph"}});
  c.expect(pair.terms.size() == 2 && pair.terms[0].score == pair.terms[1].score, "symmetric pair ties");
  return c.outcome("max |score - oracle| = " + num(worst));
}

Outcome tot_planted_topics() {
  Check c;
  const auto corpus = testing::two_topic_corpus(7);
  std::size_t tokens = 0;
  for (const auto& d : corpus.docs) tokens += d.words.size();
  structure::TotOptions o;
  o.seed = 42;
  const auto m = structure::tot_fit(corpus.docs, o);
  std::vector<int> got;
  for (const auto& z : m.assignments)
    for (const auto k : z) got.push_back(static_cast<int>(k));
  const double nmi = testing::normalized_mutual_information(corpus.flat_labels, got);
  c.expect(nmi >= 0.8, "NMI " + num(nmi));

  std::map<std::size_t, std::array<int, 2>> votes;
  for (std::size_t d = 0; d < corpus.docs.size(); ++d)
    for (std::size_t i = 0; i < m.assignments[d].size(); ++i)
      ++votes[m.assignments[d][i]][static_cast<std::size_t>(corpus.labels[d][i])];
  double late_mode = 0, early_mode = 0;
  if (votes.size() == 2) {
    // Planted topic 0 is the late one.
    const std::size_t late = votes[0][0] > votes[0][1] ? 0 : 1;
    late_mode = structure::beta_mode(m.psi[late]);
    early_mode = structure::beta_mode(m.psi[1 - late]);
    c.expect(late_mode > early_mode, "psi modes out of order");
  } else {
    c.expect(false, "expected two recovered topics");
  }
  c.expect(structure::tot_fit(corpus.docs, o) == m, "second run differs");
  return c.outcome("NMI = " + num(nmi) + ", psi modes early " + num(early_mode) + " < late " + num(late_mode) +
                   ", " + std::to_string(tokens) + " tokens, reproducible");
}

Outcome relation_rules() {
  Check c;
  const double p = relations::pmi(10, 4, 5, 4);
  c.expect(std::abs(p - std::log(2.0)) <= 1e-12, "PMI " + num(p, 17));
  std::mt19937_64 rng(8);
  int graphs = 0, cut = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto rg = testing::random_graph(rng);
    const auto expected = testing::brute_force_cycle_cut(rg.nodes, rg.inclusion);
    const auto g = relations::merge_validate(rg.ids, rg.rels, {});
    std::vector<std::pair<int, int>> got;
    for (const auto& r : g.removed) got.push_back({std::stoi(r.src.substr(1)), std::stoi(r.dst.substr(1))});
    c.expect(got == expected, "graph " + std::to_string(trial) + " cut differs");
    c.expect(g.inclusion_order().has_value(), "graph " + std::to_string(trial) + " still cyclic");
    ++graphs;
    cut += static_cast<int>(got.size());
  }
  return c.outcome("|PMI - ln 2| = " + num(std::abs(p - std::log(2.0))) + "; " + std::to_string(graphs) +
                   " planted-cycle graphs (2..8 nodes), " + std::to_string(cut) + " edges cut, all match");
}

Outcome glyph_geometry() {
  using layout::ColorRole;
  using layout::GlyphShape;
  using layout::GlyphSpec;
  Check c;
  const std::vector<std::pair<ElementKind, std::optional<GlyphSpec>>> table = {
      {ElementKind::kText, GlyphSpec{GlyphShape::kCircle, ColorRole::kConceptBlue}},
      {ElementKind::kFigure, GlyphSpec{GlyphShape::kRectangle, ColorRole::kFigureTableGreen}},
      {ElementKind::kTable, GlyphSpec{GlyphShape::kRectangle, ColorRole::kFigureTableGreen}},
      {ElementKind::kEquation, GlyphSpec{GlyphShape::kHexagon, ColorRole::kEquationCodeRed}},
      {ElementKind::kCodeBlock, GlyphSpec{GlyphShape::kHexagon, ColorRole::kEquationCodeRed}},
      {ElementKind::kTeacherImage, std::nullopt},
      {ElementKind::kSubtitle, std::nullopt},
      {ElementKind::kTest, GlyphSpec{GlyphShape::kTriangle, ColorRole::kExampleTestYellow}},
      {ElementKind::kExample, GlyphSpec{GlyphShape::kTriangle, ColorRole::kExampleTestYellow}},
  };
  c.expect(table.size() == kAllElementKinds.size(), "table size");
  for (const auto& [kind, glyph] : table) c.expect(layout::element_glyph(kind) == glyph, std::string(to_string(kind)));

  std::mt19937_64 rng(77);
  int sets = 0;
  for (int trial = 0; trial < 500; ++trial, ++sets) {
    const std::int64_t duration = 1 + static_cast<std::int64_t>(rng() % 10'000'000);
    std::vector<std::int64_t> starts(1 + rng() % 15), lengths(starts.size());
    for (auto& t : starts) t = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(duration));
    for (auto& l : lengths) l = static_cast<std::int64_t>(rng() % 300) * 1000;
    std::sort(starts.begin(), starts.end());
    for (std::size_t i = 1; i < starts.size(); ++i) {
      c.expect(layout::timeline_angle(starts[i - 1], duration) <= layout::timeline_angle(starts[i], duration),
               "angle not monotone");
    }
    const auto max_len = *std::max_element(lengths.begin(), lengths.end());
    for (const auto a : lengths) {
      const double ra = layout::radius_norm(a, max_len);
      c.expect(ra >= 0.35 && ra <= 1.0, "radius out of [r_min, r_max]");
      for (const auto b : lengths) {
        const double rb = layout::radius_norm(b, max_len);
        if (a < b) c.expect(ra < rb, "radius not monotone");
        if (a == b) c.expect(ra == rb, "radius not a function of duration");
      }
    }
  }
  return c.outcome("9/9 glyph rows; angle and radius monotone on " + std::to_string(sets) + " random concept sets");
}

Outcome state_machine() {
  using namespace manifest;
  using E = InteractionEvent;
  Check c;
  constexpr std::int64_t kDuration = 600000;
  std::vector<concepts::Concept> concepts(2);
  concepts[0].id = "c-01";
  concepts[0].spans = {{0, 100000}};
  concepts[0].importance = 0.4;
  concepts[1].id = "c-02";
  concepts[1].spans = {{50000, 200000}};
  concepts[1].importance = 0.9;
  const TransitionContext ctx{{}, kDuration, &concepts};

  const std::vector<PlayerState> states = {PlayerState::playing(0), PlayerState::playing(75000),
                                           PlayerState::focused(75000, "e-3", 70000),
                                           PlayerState::paused(75000, Anchor{AnchorKind::kConcept, "c-02"}),
                                           PlayerState::paused(300000, std::nullopt)};
  const std::vector<InteractionEvent> events = {
      E::hover_start("e-1"),       E::hover_dwell("e-1", 0),    E::hover_dwell("e-1", 2999),
      E::hover_dwell("e-1", 3000), E::hover_dwell("e-1", 9000), E::hover_end(),
      E::click("e-2"),             E::pause_button(),           E::play_button(),
      E::seek(1234),               E::seek(-50),                E::seek(kDuration + 1),
      E::time_node_click(42000),   E::concept_anchor_click("c-01", 5000),
      E::concept_anchor_click("c-01", kDuration * 2)};
  std::set<std::pair<StateKind, EventKind>> covered;
  int cells = 0;
  for (const auto& s : states)
    for (const auto& e : events) {
      c.expect(transition(s, e, ctx) == testing::oracle(s, e, ctx), to_json(s).dump() + " + " + to_json(e).dump());
      covered.insert({s.kind, e.kind});
      ++cells;
    }
  c.expect(covered.size() == kAllStateKinds.size() * kAllEventKinds.size(), "not every (state, event) kind covered");

  std::mt19937_64 rng(4242);
  auto s = PlayerState::playing(0);
  for (int step = 0; step < 10000; ++step) {
    const auto element = "e-" + std::to_string(rng() % 6);
    const auto t = static_cast<std::int64_t>(rng() % (kDuration + 200000)) - 100000;
    InteractionEvent e;
    switch (rng() % 9) {
      case 0: e = E::hover_start(element); break;
      case 1: e = E::hover_dwell(element, static_cast<std::int64_t>(rng() % 6000)); break;
      case 2: e = E::hover_end(); break;
      case 3: e = E::click(element); break;
      case 4: e = E::pause_button(); break;
      case 5: e = E::play_button(); break;
      case 6: e = E::seek(t); break;
      case 7: e = E::time_node_click(t); break;
      default: e = E::concept_anchor_click("c-0" + std::to_string(1 + rng() % 2), t); break;
    }
    const auto next = transition(s, e, ctx);
    const bool defined = next.t_ms >= 0 && next.t_ms <= kDuration &&
                         (next.kind == StateKind::kFocused) != next.target_element.empty() &&
                         (next.kind == StateKind::kPausedFull || !next.anchor.has_value());
    c.expect(defined, "undefined state at step " + std::to_string(step));
    c.expect(next == testing::oracle(s, e, ctx), "fuzz step " + std::to_string(step) + " disagrees with oracle");
    s = next;
  }
  const auto playing = PlayerState::playing(12000);
  c.expect(transition(playing, E::hover_dwell("e-1", 2999), ctx) == playing, "2999 ms dwell focused");
  c.expect(transition(playing, E::hover_dwell("e-1", 3000), ctx) == PlayerState::focused(12000, "e-1", 12000),
           "3000 ms dwell did not focus");
  return c.outcome(std::to_string(cells) + " table cells, 10000 fuzz steps, 2999/3000 ms boundary exact");
}

struct DemoRun {
  fs::path root_a, root_b;
  bool built = false;
  double seconds = 0;
};

DemoRun& demo_run() {
  static DemoRun run;
  return run;
}

fs::path demo_scratch() {
  static const fs::path dir = fs::temp_directory_path() / ("moocaug-acceptance-" + std::to_string(::getpid()));
  return dir;
}

int run_cli_build(const fs::path& out) {
  const std::string cmd = std::string("\"") + MOOCAUG_CLI + "\" --log-level warn build --config \"" +
                          (fs::path(MOOCAUG_DATA_DIR) / "demo" / "course.ini").string() +
                          "\" --set paths.output=\"" + out.string() + "\" > /dev/null 2>> \"" + (demo_scratch() / "cli.log").string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome end_to_end_determinism() {
  Check c;
  auto& run = demo_run();
  run.root_a = demo_scratch() / "a";
  run.root_b = demo_scratch() / "b";
  fs::create_directories(demo_scratch());
  const auto t0 = Clock::now();
  const int rc_a = run_cli_build(run.root_a);
  const int rc_b = run_cli_build(run.root_b);
  run.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  c.expect(rc_a == 0 && rc_b == 0, "cli exit codes " + std::to_string(rc_a) + ", " + std::to_string(rc_b));
  const auto a = testing::read_file(run.root_a / "fundamental-charts" / serve::kManifestFile);
  const auto b = testing::read_file(run.root_b / "fundamental-charts" / serve::kManifestFile);
  c.expect(!a.empty(), "no manifest written");
  c.expect(a == b, "manifests differ between runs");
  const auto report = manifest::validate_manifest(a);
  c.expect(report.ok(), std::to_string(report.violations.size()) + " validation violation(s)");
  std::size_t segments = 0;
  if (!a.empty()) segments = Json::parse(a)["segments"].size();
  c.expect(segments == 8, std::to_string(segments) + " segments on the 8-slide demo");
  run.built = rc_a == 0 && !a.empty();
  return c.outcome(std::to_string(a.size()) + " bytes, sha256 " + sha256_hex(a).substr(0, 12) +
                   "..., identical across 2 runs, " + std::to_string(report.violations.size()) + " violations, " +
                   std::to_string(segments) + " segments");
}

Outcome service_contract() {
  Check c;
  const auto& run = demo_run();
  if (!run.built) return {false, "demo course was not built"};
  const auto course_dir = run.root_a / "fundamental-charts";
  const auto before = [&] {
    std::map<std::string, std::string> snap;
    for (const auto& e : fs::recursive_directory_iterator(run.root_a))
      snap[e.path().string()] = e.is_regular_file() ? sha256_hex(testing::read_file(e.path())) : "dir";
    return snap;
  };
  const auto snapshot_before = before();

  serve::Server server(serve::CourseStore::scan(run.root_a));
  if (!server.bind("127.0.0.1", 0)) return {false, "bind failed"};
  std::thread th([&] { server.run(); });
  server.wait_until_ready();
  auto client = [&] {
    httplib::Client cl("127.0.0.1", server.port());
    cl.set_url_encode(false);
    return cl;
  };
  auto get = [&](const std::string& path, const httplib::Headers& h = {}) {
    auto cl = client();
    auto res = cl.Get(path, h);
    return res ? std::optional<httplib::Response>(*res) : std::nullopt;
  };
  auto expect_status = [&](const std::string& path, int status) {
    const auto res = get(path);
    c.expect(res && res->status == status,
             path + " -> " + (res ? std::to_string(res->status) : std::string("no response")));
    return res;
  };

  int endpoints = 0;
  if (const auto r = expect_status("/healthz", 200)) c.expect(r->body == "ok", "healthz body"), ++endpoints;
  if (const auto r = expect_status("/courses", 200))
    c.expect(Json::parse(r->body) == Json::array({"fundamental-charts"}), "course list"), ++endpoints;
  const auto manifest = testing::read_file(course_dir / serve::kManifestFile);
  if (const auto r = expect_status("/courses/fundamental-charts/manifest", 200)) {
    c.expect(r->body == manifest, "manifest bytes");
    const auto etag = r->get_header_value("ETag");
    c.expect(etag == "\"" + sha256_hex(manifest) + "\"", "etag");
    const auto again = get("/courses/fundamental-charts/manifest", {{"If-None-Match", etag}});
    c.expect(again && again->status == 304, "conditional GET not 304");
    ++endpoints;
  }
  if (const auto r = expect_status("/courses/fundamental-charts/transcript", 200))
    c.expect(r->body == testing::read_file(course_dir / "transcript.srt"), "transcript bytes"), ++endpoints;
  const auto assets = Json::parse(manifest)["segments"];
  int asset_hits = 0;
  for (const auto& seg : assets) {
    const auto rel = seg["keyframe_asset"].get<std::string>();
    if (const auto r = expect_status("/courses/fundamental-charts/assets/" + rel, 200)) {
      c.expect(r->body == testing::read_file(course_dir / serve::kAssetDir / rel), "asset bytes " + rel);
      c.expect(r->get_header_value("Content-Type") == serve::content_type_for(rel), "asset type " + rel);
      ++asset_hits;
    }
  }
  if (asset_hits > 0) ++endpoints;
  for (const char* p : {"/courses/nosuch/manifest", "/courses/nosuch/transcript",
                        "/courses/fundamental-charts/assets/keyframes/nosuch.pgm"})
    expect_status(p, 404);

  const std::vector<std::string> attacks = {
      "/courses/fundamental-charts/assets/../manifest.json",
      "/courses/fundamental-charts/assets/../../a/fundamental-charts/manifest.json",
      "/courses/fundamental-charts/assets/%2e%2e/%2e%2e/etc/passwd",
      "/courses/fundamental-charts/assets/%2E%2E%2F%2E%2E%2Fetc%2Fpasswd",
      "/courses/fundamental-charts/assets/%252e%252e/%252e%252e/etc/passwd",
      "/courses/fundamental-charts/assets/%25252e%25252e/etc/passwd",
      "/courses/fundamental-charts/assets/.%2e/manifest.json",
      "/courses/fundamental-charts/assets/..%5c..%5cmanifest.json",
      "/courses/fundamental-charts/assets/keyframes/0.pgm%00.txt",
      "/courses/..%2f..%2fetc/manifest",
      "/courses/fundamental-charts/assets//etc/passwd",
      "/courses/fundamental-charts/assets/.hidden",
      "/courses/fundamental-charts/assets/%zz",
      "/courses/fundamental-charts/assets/%c0%ae%c0%ae/manifest.json",
  };
  int rejected = 0;
  for (const auto& p : attacks) {
    const auto r = get(p);
    const bool ok = r && r->status == 400;
    c.expect(ok, "attack not rejected: " + p + (r ? " -> " + std::to_string(r->status) : ""));
    rejected += ok;
  }

  std::vector<std::future<std::string>> racers;
  for (int i = 0; i < 32; ++i) {
    racers.push_back(std::async(std::launch::async, [&, i] {
      const auto path = i % 2 ? std::string("/courses/fundamental-charts/manifest")
                              : "/courses/fundamental-charts/assets/" + assets[0]["keyframe_asset"].get<std::string>();
      const auto r = get(path);
      return r && r->status == 200 ? r->body : std::string("<failed>");
    }));
  }
  const auto keyframe0 = testing::read_file(course_dir / serve::kAssetDir / assets[0]["keyframe_asset"].get<std::string>());
  int clean = 0;
  for (int i = 0; i < 32; ++i) {
    const auto body = racers[static_cast<std::size_t>(i)].get();
    const bool ok = body == (i % 2 ? manifest : keyframe0);
    c.expect(ok, "concurrent GET " + std::to_string(i) + " returned different bytes");
    clean += ok;
  }
  server.stop();
  th.join();
  c.expect(before() == snapshot_before, "serving changed files under the course root");
  return c.outcome(std::to_string(endpoints) + "/5 endpoints, " + std::to_string(rejected) + "/" +
                   std::to_string(attacks.size()) + " attacks rejected, " + std::to_string(clean) +
                   "/32 concurrent GETs identical");
}

struct Criterion {
  const char* name;
  const char* tolerance;
  double time_limit_s;  // 0: none
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  const std::vector<Criterion> criteria = {
      {"emd-correctness", "1000 pairs |d| <= 1e-9, metric axioms on 1000 triples", 5, emd_correctness},
      {"segmentation", "P = R = 1.0 on 10 slides, illumination jumps rejected", 2, segmentation_precision_recall},
      {"textrank", "30-token fixture within 1e-6 of power iteration", 0, textrank_oracle},
      {"topics-over-time", "NMI >= 0.8, psi ordered, bit-reproducible", 30, tot_planted_topics},
      {"relation-rules", "PMI = ln 2 within 1e-12, cycle cut = brute force", 0, relation_rules},
      {"glyph-geometry", "9 glyph rows exact, angle/radius monotone", 0, glyph_geometry},
      {"state-machine", "exhaustive table, 1e4-step fuzz, 2999/3000 ms", 0, state_machine},
      {"end-to-end-determinism", "byte-identical demo manifests, empty report", 60, end_to_end_determinism},
      {"service-contract", "5 endpoints, traversal corpus, concurrent GETs", 0, service_contract},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (cr.time_limit_s > 0 && secs >= cr.time_limit_s) {
      o.pass = false;
      o.detail += " | over the " + num(cr.time_limit_s) + " s limit";
    }
    failed += !o.pass;
    std::printf("%s  %-24s [%s] %.3f s%s  %s\n", o.pass ? "PASS" : "FAIL", cr.name, cr.tolerance, secs,
                cr.time_limit_s > 0 ? (" (limit " + num(cr.time_limit_s) + " s)").c_str() : "", o.detail.c_str());
    std::fflush(stdout);
  }
  std::error_code ec;
  fs::remove_all(demo_scratch(), ec);
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}

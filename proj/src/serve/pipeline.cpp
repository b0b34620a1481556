#include "moocaug/serve/pipeline.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "moocaug/common/digest.hpp"
#include "moocaug/common/parallel.hpp"
#include "moocaug/concepts/concepts.hpp"
#include "moocaug/elements/elements.hpp"
#include "moocaug/ingest/annotations.hpp"
#include "moocaug/ingest/errors.hpp"
#include "moocaug/ingest/frames.hpp"
#include "moocaug/ingest/transcript.hpp"
#include "moocaug/layout/layout.hpp"
#include "moocaug/manifest/manifest.hpp"
#include "moocaug/relations/relations.hpp"
#include "moocaug/slideseg/segmentation.hpp"
#include "moocaug/structure/structure.hpp"

namespace moocaug::serve {
namespace fs = std::filesystem;

std::string_view to_string(StageStatus s) {
  switch (s) {
    case StageStatus::kOk: return "ok";
    case StageStatus::kFailed: return "failed";
    case StageStatus::kSkipped: return "skipped";
  }
  return "skipped";
}

Json to_json(const BuildReport& r) {
  Json stages = Json::array();
  for (const auto& s : r.stages) {
    stages.push_back({{"stage", s.name},
                      {"status", to_string(s.status)},
                      {"elapsed_ms", s.elapsed_ms},
                      {"warnings", s.warnings},
                      {"dropped", s.dropped},
                      {"summary", s.summary}});
  }
  Json out = {{"course_id", r.course_id},
              {"status", r.ok() ? "ok" : "failed"},
              {"failed_stage", r.ok() ? Json(nullptr) : Json(r.failed_stage)},
              {"error", r.ok() ? Json(nullptr) : Json(r.error)},
              {"stages", stages},
              {"segmentation", r.segmentation.is_null() ? Json::object() : r.segmentation},
              {"topics", r.topics.is_null() ? Json::object() : r.topics}};
  if (r.ok()) out["manifest"] = {{"sha256", r.manifest_sha256}, {"bytes", r.manifest_bytes}};
  return out;
}

ClientFactory http_clients() {
  ClientFactory f;
  f.detector = [](const std::string& url) -> std::unique_ptr<JsonTransport> {
    return std::make_unique<HttpJsonTransport>(url);
  };
  f.llm = [](const std::string& url) -> std::unique_ptr<JsonTransport> {
    return std::make_unique<HttpJsonTransport>(url, std::chrono::seconds(120));
  };
  return f;
}

namespace {

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ingest::IngestError(ingest::IngestErrc::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_bytes(const fs::path& path, std::string_view bytes) {
  fs::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("cannot write " + tmp);
  }
  fs::rename(tmp, path);
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (const char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::string replace_all(std::string s, std::string_view from, const std::string& to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) s.replace(pos, from.size(), to);
  return s;
}

fs::path course_dir(const BuildConfig& c) { return c.output / c.course_id; }

fs::path tools_dir() {
  std::error_code ec;
  const auto exe = fs::read_symlink("/proc/self/exe", ec);
  return ec ? fs::current_path() : exe.parent_path();
}

// Everything the stages hand to each other.
struct Course {
  std::string subtitle_bytes;
  ingest::SubtitleFormat subtitle_format = ingest::SubtitleFormat::kSrt;
  ingest::Transcript transcript;
  ingest::AnnotationSet annotations;
  ingest::FrameSeries frames;
  fs::path frame_dir;  // image directory the frames came from, if any
  std::int64_t duration_ms = 0;

  slideseg::Segmentation segmentation;
  std::vector<std::string> keyframe_assets;
  std::vector<std::string> keyframe_bytes;

  elements::ElementSet element_set;
  std::vector<concepts::Concept> concepts;
  relations::ConceptGraph graph;

  structure::TotModel topic_model;
  Json topics;
  structure::ImportanceCurve curve;
  std::vector<std::int64_t> time_nodes;
  std::vector<structure::OverviewGroup> overview;

  layout::TrackSet tracks;
  std::vector<layout::RadialLayout> radials;
  std::vector<layout::StageAssignment> stages;
};

// A bar chart of the histogram, for frame sources that carry no images.
std::string histogram_preview(const std::vector<double>& histogram) {
  ingest::GrayImage img;
  img.width = static_cast<int>(histogram.size());
  img.height = 96;
  img.pixels.assign(static_cast<std::size_t>(img.width * img.height), 255);
  double peak = 0;
  for (const double v : histogram) peak = std::max(peak, v);
  for (int x = 0; x < img.width; ++x) {
    const int h = peak > 0 ? static_cast<int>(std::lround(histogram[static_cast<std::size_t>(x)] / peak * (img.height - 1))) : 0;
    for (int y = img.height - h; y < img.height; ++y) img.pixels[static_cast<std::size_t>(y * img.width + x)] = 40;
  }
  return ingest::encode_pgm(img);
}

class Builder {
 public:
  Builder(const BuildConfig& config, const ClientFactory& clients) : cfg_(config), clients_(clients) {
    analyzer_ = TextAnalyzer(cfg_.stopwords.empty() ? StopwordList() : StopwordList::from_file(cfg_.stopwords),
                             cfg_.lemmas.empty() ? Lemmatizer() : Lemmatizer::from_file(cfg_.lemmas));
  }

  void ingest(StageRecord& rec) {
    if (!fs::is_regular_file(cfg_.subtitles)) {
      throw ingest::IngestError(ingest::IngestErrc::kIo, "subtitle file not found: " + cfg_.subtitles.string());
    }
    c_.subtitle_bytes = read_bytes(cfg_.subtitles);
    c_.subtitle_format = ingest::detect_subtitle_format(c_.subtitle_bytes, cfg_.subtitles.filename().string());
    auto parsed = ingest::parse_subtitles(c_.subtitle_bytes, c_.subtitle_format);
    c_.transcript = std::move(parsed.transcript);
    for (const auto& r : parsed.rejected) {
      rec.dropped.push_back({{"source", "subtitles"}, {"line", r.line}, {"reason", r.reason}});
    }

    if (!cfg_.annotations.empty()) c_.annotations = ingest::load_annotations(cfg_.annotations);

    fs::path source = cfg_.frames;
    if (!cfg_.frames_extractor.empty()) {
      source = course_dir(cfg_) / "work" / "frames";
      fs::remove_all(source);
      fs::create_directories(source);
      auto cmd = replace_all(cfg_.frames_extractor, "{out}", shell_quote(source.string()));
      cmd = replace_all(cmd, "{tools}", shell_quote(tools_dir().string()));
      spdlog::info("running frame extractor: {}", cmd);
      const int rc = std::system(cmd.c_str());
      if (rc != 0) {
        throw ingest::IngestError(ingest::IngestErrc::kNoFrames,
                                  "frame extractor exited with status " + std::to_string(rc));
      }
    }
    auto frames = ingest::load_frames(source, cfg_.frame_options);
    c_.frames = std::move(frames.series);
    rec.warnings.insert(rec.warnings.end(), frames.warnings.begin(), frames.warnings.end());
    if (fs::is_directory(source) && !fs::is_regular_file(source / ingest::kHistogramCacheName)) c_.frame_dir = source;

    const auto& last = c_.frames.frames.back();
    const auto natural = std::max(c_.transcript.end_ms(), last.t_ms + cfg_.frame_options.sample_interval_ms);
    c_.duration_ms = cfg_.duration_ms.value_or(natural);
    if (c_.duration_ms < c_.transcript.end_ms()) {
      throw ingest::IngestError(ingest::IngestErrc::kIo, "course.duration_ms ends before the transcript");
    }
    if (c_.duration_ms <= last.t_ms) {
      throw ingest::IngestError(ingest::IngestErrc::kIo, "course.duration_ms ends before the last frame");
    }
    rec.summary = {{"cues", c_.transcript.cues.size()},
                   {"subtitle_format", ingest::to_string(c_.subtitle_format)},
                   {"frames", c_.frames.frames.size()},
                   {"annotations", c_.annotations.entries.size()},
                   {"duration_ms", c_.duration_ms}};
  }

  void slideseg(StageRecord& rec, BuildReport& report) {
    c_.segmentation = slideseg::segment_slides(c_.frames, c_.duration_ms, cfg_.segmentation);
    report.segmentation = c_.segmentation.report();
    for (const auto& s : c_.segmentation.segments) {
      const auto& frame = c_.frames.frames[s.keyframe_frame];
      if (!c_.frame_dir.empty()) {
        const auto src = c_.frame_dir / frame.source_ref;
        c_.keyframe_assets.push_back("keyframes/" + std::to_string(s.index) + src.extension().string());
        c_.keyframe_bytes.push_back(read_bytes(src));
      } else {
        c_.keyframe_assets.push_back("keyframes/" + std::to_string(s.index) + ".pgm");
        c_.keyframe_bytes.push_back(histogram_preview(frame.histogram));
      }
    }
    std::size_t rejected = 0;
    for (const auto& v : c_.segmentation.verdicts)
      if (!v.survived) ++rejected;
    rec.summary = {{"segments", c_.segmentation.segments.size()},
                   {"candidates", c_.segmentation.verdicts.size()},
                   {"rejected_candidates", rejected}};
  }

  void elements(StageRecord& rec) {
    elements::ClientResult client;
    bool have_client = false;
    if (cfg_.detector_url) {
      std::vector<elements::KeyframeRef> refs;
      for (std::size_t i = 0; i < c_.segmentation.segments.size(); ++i) {
        refs.push_back({i, c_.keyframe_assets[i], base64_encode(c_.keyframe_bytes[i])});
      }
      try {
        auto transport = clients_.detector(*cfg_.detector_url);
        client = elements::classify_via_client(*transport, refs, c_.segmentation.segments, cfg_.detector);
        have_client = true;
      } catch (const elements::ElementsError& e) {
        if (e.code() != elements::ElementsErrc::kClientUnreachable || cfg_.detector_required) throw;
        rec.warnings.push_back(std::string("detector unreachable, using annotations and fallback: ") + e.what());
      }
    }
    auto options = cfg_.element_options;
    if (!cfg_.test_lexicon.empty()) options.auxiliary.test_lexicon = read_word_list(cfg_.test_lexicon);
    if (!cfg_.example_lexicon.empty()) options.auxiliary.example_lexicon = read_word_list(cfg_.example_lexicon);
    c_.element_set = elements::assemble_elements(c_.segmentation.segments, c_.annotations, c_.transcript,
                                                 have_client ? &client : nullptr, options);
    for (const auto& d : c_.element_set.dropped) {
      rec.dropped.push_back({{"source", d.source},
                             {"segment_index", d.segment_index},
                             {"entry_index", d.entry_index},
                             {"reason", d.reason}});
    }
    Json kinds = Json::object();
    for (const auto& e : c_.element_set.elements) {
      const auto name = std::string(to_string(e.kind));
      kinds[name] = kinds.value(name, 0) + 1;
    }
    rec.summary = {{"elements", c_.element_set.elements.size()}, {"by_kind", kinds}, {"detector", have_client}};
  }

  void concepts(StageRecord& rec) {
    auto& els = c_.element_set.elements;
    std::vector<std::vector<std::string>> sequences;
    std::vector<std::vector<AnalyzedToken>> texts;
    auto add = [&](std::string_view text) {
      auto tokens = analyzer_.analyze(text);
      std::vector<std::string> lemmas;
      for (const auto& t : tokens)
        if (t.content) lemmas.push_back(t.lemma);
      sequences.push_back(std::move(lemmas));
      texts.push_back(std::move(tokens));
    };
    for (const auto& cue : c_.transcript.cues) add(cue.text);
    // Subtitle elements repeat the cue text.
    for (const auto& e : els)
      if (e.text && e.kind != ElementKind::kSubtitle) add(*e.text);

    const auto ranked = concepts::textrank(sequences, cfg_.textrank);
    const auto labels = concepts::assemble_keyphrases(ranked.terms, texts, cfg_.keyphrases);
    auto linked = concepts::link_mentions(labels, c_.transcript, els, analyzer_);
    for (const auto& w : linked.warnings) rec.warnings.push_back(w);

    const auto evidence = concepts::delivery_evidence(c_.element_set, c_.segmentation.segments.size());
    for (auto& x : linked.concepts) {
      x.spans = concepts::mention_spans(x, cfg_.gap_ms);
      x.duration_ms = concepts::compute_duration(x, cfg_.gap_ms);
      x.delivery_style = concepts::classify_delivery(x.spans, c_.segmentation.segments, evidence);
    }
    c_.concepts = std::move(linked.concepts);
    if (c_.concepts.empty()) throw Error("no concept has a mention in the course");
    Json labels_json = Json::array();
    for (const auto& x : c_.concepts) labels_json.push_back(x.label);
    rec.summary = {{"terms", ranked.terms.size()},
                   {"textrank_iterations", ranked.iterations},
                   {"concepts", c_.concepts.size()},
                   {"labels", labels_json}};
  }

  void relations(StageRecord& rec) {
    const auto& els = c_.element_set.elements;
    const auto rule = relations::rule_relations(c_.concepts, c_.transcript, els, c_.segmentation.segments, cfg_.rules,
                                                analyzer_);
    std::vector<relations::Relationship> llm;
    bool enriched = false;
    if (cfg_.llm_url) {
      const auto prompt = cfg_.prompt_template.empty()
                              ? relations::PromptTemplate::builtin()
                              : relations::PromptTemplate::parse(read_bytes(cfg_.prompt_template));
      try {
        auto transport = clients_.llm(*cfg_.llm_url);
        const auto chunks = relations::chunk_transcript(c_.transcript, cfg_.llm.token_budget);
        auto result = relations::llm_enrich(*transport, chunks, c_.concepts, prompt, cfg_.llm, analyzer_);
        for (const auto& d : result.dropped) {
          rec.dropped.push_back({{"source", "llm"}, {"chunk", d.chunk}, {"entry", d.entry}, {"reason", d.reason}});
        }
        for (const auto k : result.skipped_chunks) {
          rec.warnings.push_back("llm chunk " + std::to_string(k) + " skipped after malformed replies");
        }
        llm = std::move(result.proposals);
        enriched = true;
      } catch (const relations::RelationsError& e) {
        if (e.code() != relations::RelationsErrc::kClientUnreachable) throw;
        rec.warnings.push_back(std::string("llm unreachable, rule relations only: ") + e.what());
      }
    }
    std::vector<std::string> ids;
    for (const auto& x : c_.concepts) ids.push_back(x.id);
    c_.graph = relations::merge_validate(ids, rule, llm);
    for (const auto& w : c_.graph.warnings) rec.dropped.push_back({{"source", "graph"}, {"reason", w}});
    for (const auto& r : c_.graph.removed) {
      rec.warnings.push_back("inclusion " + r.src + " -> " + r.dst + " removed to break a cycle");
    }

    std::vector<double> raw;
    for (std::size_t i = 0; i < c_.concepts.size(); ++i) {
      raw.push_back(concepts::raw_importance(c_.concepts[i].duration_ms, c_.graph.degrees(i), cfg_.importance));
    }
    const auto importance = concepts::normalize_importance(raw);
    for (std::size_t i = 0; i < c_.concepts.size(); ++i) c_.concepts[i].importance = importance[i];

    Json by_kind = Json::object();
    for (const auto k : relations::kAllRelationKinds) by_kind[std::string(to_string(k))] = 0;
    for (const auto& r : c_.graph.relationships) by_kind[std::string(to_string(r.kind))] = by_kind[std::string(to_string(r.kind))].get<int>() + 1;
    rec.summary = {{"rule_relations", rule.size()},
                   {"llm_proposals", llm.size()},
                   {"llm", enriched},
                   {"relationships", by_kind},
                   {"removed_cycle_edges", c_.graph.removed.size()}};
  }

  void structure(StageRecord& rec, BuildReport& report) {
    const auto docs = structure::cue_window_documents(c_.transcript, cfg_.tot_window_cues, c_.duration_ms, analyzer_);
    structure::TotOptions o;
    o.topics = cfg_.topics > 0 ? cfg_.topics : structure::default_topic_count(c_.segmentation.segments.size());
    o.iterations = cfg_.tot_iterations;
    o.alpha = cfg_.tot_alpha;
    o.beta = cfg_.tot_beta;
    o.seed = cfg_.seed;
    c_.topic_model = structure::tot_fit(docs, o);
    c_.topics = structure::topic_report(c_.topic_model, docs, c_.segmentation.segments);
    report.topics = c_.topics;
    c_.curve = structure::importance_curve(c_.concepts, c_.duration_ms, cfg_.curve_stride_ms);
    c_.time_nodes = structure::key_time_nodes(c_.curve, cfg_.time_nodes);
    c_.overview = structure::partition_overview(c_.concepts);
    structure::label_groups(c_.overview, c_.concepts, c_.topic_model, cfg_.topic_label_words);
    rec.summary = {{"documents", docs.size()},
                   {"topics", o.topics},
                   {"time_nodes", c_.time_nodes.size()},
                   {"overview_groups", c_.overview.size()}};
  }

  void layout(StageRecord& rec) {
    const layout::CourseView view{c_.duration_ms, &c_.concepts, &c_.graph, &c_.element_set.elements, &c_.transcript};
    c_.tracks = layout::highlight_tracks(view, cfg_.layout, analyzer_);
    std::vector<std::size_t> indices(c_.concepts.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    c_.radials = parallel_map(indices, cfg_.max_concurrency,
                              [&](std::size_t i) { return layout::radial_layout(i, view, cfg_.layout); });
    c_.stages = parallel_map(indices, cfg_.max_concurrency,
                             [&](std::size_t i) { return layout::stage_assign(i, view, cfg_.layout); });
    for (const auto& s : c_.stages) {
      std::set<std::string> seen(s.demonstration.begin(), s.demonstration.end());
      for (const auto& id : s.application) {
        if (seen.count(id)) throw Error("element " + id + " in two stages of " + s.concept_id);
      }
    }
    rec.summary = {{"highlights", c_.tracks.highlights.size()},
                   {"subtitle_emphasis", c_.tracks.subtitle_emphasis.size()},
                   {"focus_clusters", c_.tracks.focus_clusters.size()}};
  }

  void manifest(StageRecord& rec, BuildReport& report) {
    manifest::ManifestInputs in;
    in.course_id = cfg_.course_id;
    in.duration_ms = c_.duration_ms;
    in.segments = &c_.segmentation.segments;
    in.keyframe_assets = c_.keyframe_assets;
    in.transcript = &c_.transcript;
    in.elements = &c_.element_set.elements;
    in.concepts = &c_.concepts;
    in.graph = &c_.graph;
    in.topics = c_.topics;
    in.tracks = &c_.tracks;
    in.importance_curve = &c_.curve;
    in.curve_stride_ms = cfg_.curve_stride_ms;
    in.time_nodes = &c_.time_nodes;
    in.overview = &c_.overview;
    in.radial_layouts = &c_.radials;
    in.stages = &c_.stages;
    in.interaction = cfg_.interaction;
    const auto bytes = manifest::serialize_manifest(manifest::build_manifest(in));
    const auto check = manifest::validate_manifest(bytes);
    if (!check.ok()) throw Error("manifest failed validation: " + manifest::to_json(check).dump());

    const auto dir = course_dir(cfg_);
    fs::create_directories(dir);
    fs::remove_all(dir / kAssetDir / "keyframes");
    for (std::size_t i = 0; i < c_.keyframe_assets.size(); ++i) {
      write_bytes(dir / kAssetDir / c_.keyframe_assets[i], c_.keyframe_bytes[i]);
    }
    const auto transcript_name =
        std::string("transcript.") + (c_.subtitle_format == ingest::SubtitleFormat::kSrt ? "srt" : "vtt");
    for (const auto* stale : {"transcript.srt", "transcript.vtt"})
      if (stale != transcript_name) fs::remove(dir / stale);
    write_bytes(dir / transcript_name, c_.subtitle_bytes);
    write_bytes(dir / kManifestFile, bytes);
    report.manifest_sha256 = sha256_hex(bytes);
    report.manifest_bytes = bytes.size();
    rec.summary = {{"path", (dir / kManifestFile).string()}, {"bytes", bytes.size()}, {"sha256", report.manifest_sha256}};
  }

 private:
  const BuildConfig& cfg_;
  const ClientFactory& clients_;
  TextAnalyzer analyzer_;
  Course c_;
};

}  // namespace

BuildReport run_build(const BuildConfig& config, const ClientFactory& clients) {
  BuildReport report;
  report.course_id = config.course_id;
  for (const auto name : kStageNames) {
    StageRecord rec;
    rec.name = name;
    report.stages.push_back(std::move(rec));
  }

  std::unique_ptr<Builder> builder;
  auto run = [&](std::size_t index, auto&& body) {
    auto& rec = report.stages[index];
    if (!report.ok()) return;
    const auto start = std::chrono::steady_clock::now();
    try {
      if (!builder) builder = std::make_unique<Builder>(config, clients);
      body(rec);
      rec.status = StageStatus::kOk;
    } catch (const std::exception& e) {
      rec.status = StageStatus::kFailed;
      report.failed_stage = rec.name;
      report.error = e.what();
      spdlog::error("stage {} failed: {}", rec.name, e.what());
    }
    rec.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (rec.status == StageStatus::kOk) spdlog::info("stage {} done in {:.1f} ms", rec.name, rec.elapsed_ms);
    for (const auto& w : rec.warnings) spdlog::warn("{}: {}", rec.name, w);
  };

  run(0, [&](StageRecord& r) { builder->ingest(r); });
  run(1, [&](StageRecord& r) { builder->slideseg(r, report); });
  run(2, [&](StageRecord& r) { builder->elements(r); });
  run(3, [&](StageRecord& r) { builder->concepts(r); });
  run(4, [&](StageRecord& r) { builder->relations(r); });
  run(5, [&](StageRecord& r) { builder->structure(r, report); });
  run(6, [&](StageRecord& r) { builder->layout(r); });
  run(7, [&](StageRecord& r) { builder->manifest(r, report); });

  std::error_code ec;
  const auto dir = course_dir(config);
  fs::create_directories(dir, ec);
  if (!ec) {
    try {
      write_bytes(dir / kReportFile, canonical_dump(to_json(report)));
    } catch (const std::exception& e) {
      spdlog::error("cannot write build report: {}", e.what());
    }
  }
  return report;
}

}  // namespace moocaug::serve

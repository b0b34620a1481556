#include "moocaug/manifest/manifest.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "moocaug/manifest/json_schema.hpp"

namespace moocaug::manifest {
namespace {

Json segment_json(const slideseg::SlideSegment& s, const std::string& asset) {
  return {{"index", s.index},
          {"start_ms", s.start_ms},
          {"end_ms", s.end_ms},
          {"keyframe_t_ms", s.keyframe_t_ms},
          {"keyframe_asset", asset},
          {"boundary_confidence", s.boundary_confidence}};
}

Json bbox_json(const BBox& b) { return {{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}}; }

template <typename T>
const T& deref(const T* p, const char* what) {
  if (!p) throw ManifestError(ManifestErrc::kInvalid, std::string("build_manifest: missing ") + what);
  return *p;
}

// Referential and semantic checks over a manifest that already passed the
// schema, so member types can be trusted.
class RefChecker {
 public:
  explicit RefChecker(const Json& m) : m_(m) {}

  std::vector<Violation> run() {
    index();
    check_segments_and_cues();
    check_elements();
    check_concepts();
    check_relationships();
    check_topics();
    check_tracks();
    check_paused();
    return std::move(out_);
  }

 private:
  void dangling(const std::string& path, const std::string& what, const std::string& id) {
    out_.push_back({ViolationKind::kDanglingReference, path, "unknown " + what + " \"" + id + "\""});
  }
  void inconsistent(const std::string& path, std::string message) {
    out_.push_back({ViolationKind::kInconsistent, path, std::move(message)});
  }
  void element_ref(const Json& v, const std::string& path) {
    if (!elements_.count(v.get<std::string>())) dangling(path, "element", v.get<std::string>());
  }
  void concept_ref(const Json& v, const std::string& path) {
    if (!concepts_.count(v.get<std::string>())) dangling(path, "concept", v.get<std::string>());
  }
  void segment_ref(const Json& v, const std::string& path) {
    if (v.get<std::size_t>() >= segment_count_) dangling(path, "segment", std::to_string(v.get<std::size_t>()));
  }
  void time_in_course(const Json& v, const std::string& path) {
    if (v.get<std::int64_t>() > duration_) inconsistent(path, "time beyond the course duration");
  }
  void interval(const Json& v, const std::string& path) {
    if (v[0].get<std::int64_t>() > v[1].get<std::int64_t>()) inconsistent(path, "interval start after end");
  }

  void index() {
    duration_ = m_["duration_ms"].get<std::int64_t>();
    segment_count_ = m_["segments"].size();
    for (std::size_t i = 0; i < m_["elements"].size(); ++i) {
      const auto id = m_["elements"][i]["id"].get<std::string>();
      if (!elements_.insert(id).second) inconsistent("/elements/" + std::to_string(i) + "/id", "duplicate element id \"" + id + "\"");
    }
    for (std::size_t i = 0; i < m_["concepts"].size(); ++i) {
      const auto id = m_["concepts"][i]["id"].get<std::string>();
      if (!concepts_.insert(id).second) inconsistent("/concepts/" + std::to_string(i) + "/id", "duplicate concept id \"" + id + "\"");
    }
    for (const auto& c : m_["cues"]) cue_lengths_.push_back(c["text"].get_ref<const std::string&>().size());
  }

  void check_segments_and_cues() {
    const auto& segs = m_["segments"];
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const auto p = "/segments/" + std::to_string(i);
      const auto& s = segs[i];
      if (s["index"].get<std::size_t>() != i) inconsistent(p + "/index", "segment index out of sequence");
      if (s["start_ms"].get<std::int64_t>() >= s["end_ms"].get<std::int64_t>()) inconsistent(p, "empty segment");
      if (i > 0 && s["start_ms"] != segs[i - 1]["end_ms"]) inconsistent(p + "/start_ms", "segments do not tile the course");
      const auto k = s["keyframe_t_ms"].get<std::int64_t>();
      if (k < s["start_ms"].get<std::int64_t>() || k > s["end_ms"].get<std::int64_t>())
        inconsistent(p + "/keyframe_t_ms", "keyframe outside its segment");
      time_in_course(s["end_ms"], p + "/end_ms");
    }
    const auto& cues = m_["cues"];
    for (std::size_t i = 0; i < cues.size(); ++i) {
      const auto p = "/cues/" + std::to_string(i);
      if (cues[i]["index"].get<std::size_t>() != i) inconsistent(p + "/index", "cue index out of sequence");
      if (cues[i]["start_ms"].get<std::int64_t>() >= cues[i]["end_ms"].get<std::int64_t>()) inconsistent(p, "empty cue");
    }
  }

  void check_elements() {
    const auto& els = m_["elements"];
    for (std::size_t i = 0; i < els.size(); ++i) {
      const auto p = "/elements/" + std::to_string(i);
      const auto& e = els[i];
      segment_ref(e["segment_index"], p + "/segment_index");
      interval(e["t_range_ms"], p + "/t_range_ms");
      const auto& b = e["bbox"];
      if (b["x"].get<double>() + b["w"].get<double>() > 1 + 1e-6 || b["y"].get<double>() + b["h"].get<double>() > 1 + 1e-6)
        inconsistent(p + "/bbox", "bbox leaves the unit square");
      for (std::size_t k = 0; k < e["concept_ids"].size(); ++k) concept_ref(e["concept_ids"][k], p + "/concept_ids/" + std::to_string(k));
    }
  }

  void check_concepts() {
    const auto& cs = m_["concepts"];
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const auto p = "/concepts/" + std::to_string(i);
      for (std::size_t k = 0; k < cs[i]["mentions"].size(); ++k) {
        const auto mp = p + "/mentions/" + std::to_string(k);
        const auto& m = cs[i]["mentions"][k];
        interval(m["interval_ms"], mp + "/interval_ms");
        const auto& loc = m["location"];
        if (loc.contains("element_id")) element_ref(loc["element_id"], mp + "/location/element_id");
        else if (loc["cue_index"].get<std::size_t>() >= cue_lengths_.size())
          dangling(mp + "/location/cue_index", "cue", std::to_string(loc["cue_index"].get<std::size_t>()));
      }
      for (std::size_t k = 0; k < cs[i]["spans_ms"].size(); ++k) interval(cs[i]["spans_ms"][k], p + "/spans_ms/" + std::to_string(k));
    }
  }

  void check_relationships() {
    for (const auto* section : {"relationships", "removed_cycle_edges"}) {
      const auto& rs = m_[section];
      for (std::size_t i = 0; i < rs.size(); ++i) {
        const auto p = std::string("/") + section + "/" + std::to_string(i);
        concept_ref(rs[i]["src"], p + "/src");
        concept_ref(rs[i]["dst"], p + "/dst");
        if (rs[i]["src"] == rs[i]["dst"]) inconsistent(p, "self-loop");
      }
    }
  }

  void check_topics() {
    const auto& t = m_["topics"];
    const auto k = t["topics"].size();
    if (t["segment_topics"].size() != segment_count_) inconsistent("/topics/segment_topics", "one entry per segment expected");
    for (std::size_t i = 0; i < t["segment_topics"].size(); ++i) {
      const auto& v = t["segment_topics"][i];
      if (!v.is_null() && v.get<std::size_t>() >= k) dangling("/topics/segment_topics/" + std::to_string(i), "topic", v.dump());
    }
  }

  void check_tracks() {
    const auto& t = m_["tracks"];
    for (std::size_t i = 0; i < t["highlights"].size(); ++i) {
      const auto p = "/tracks/highlights/" + std::to_string(i);
      element_ref(t["highlights"][i]["element_id"], p + "/element_id");
      interval(t["highlights"][i]["t_range_ms"], p + "/t_range_ms");
    }
    for (std::size_t i = 0; i < t["subtitle_emphasis"].size(); ++i) {
      const auto p = "/tracks/subtitle_emphasis/" + std::to_string(i);
      const auto& e = t["subtitle_emphasis"][i];
      concept_ref(e["concept_id"], p + "/concept_id");
      const auto cue = e["cue_index"].get<std::size_t>();
      if (cue >= cue_lengths_.size()) {
        dangling(p + "/cue_index", "cue", std::to_string(cue));
        continue;
      }
      for (std::size_t r = 0; r < e["ranges"].size(); ++r) {
        const auto b = e["ranges"][r][0].get<std::size_t>(), end = e["ranges"][r][1].get<std::size_t>();
        if (b >= end || end > cue_lengths_[cue]) inconsistent(p + "/ranges/" + std::to_string(r), "range outside the cue text");
      }
    }
    for (std::size_t i = 0; i < t["focus_clusters"].size(); ++i) {
      const auto p = "/tracks/focus_clusters/" + std::to_string(i);
      const auto& c = t["focus_clusters"][i];
      element_ref(c["element_id"], p + "/element_id");
      concept_ref(c["concept_id"], p + "/concept_id");
      std::set<std::size_t> slots;
      for (std::size_t k = 0; k < c["icons"].size(); ++k) {
        element_ref(c["icons"][k]["element_id"], p + "/icons/" + std::to_string(k) + "/element_id");
        if (!slots.insert(c["icons"][k]["slot"].get<std::size_t>()).second)
          inconsistent(p + "/icons/" + std::to_string(k) + "/slot", "slot used twice");
      }
    }
    const auto& samples = t["importance_curve"]["samples"];
    for (std::size_t i = 0; i < samples.size(); ++i) time_in_course(samples[i][0], "/tracks/importance_curve/samples/" + std::to_string(i));
    for (std::size_t i = 0; i < t["time_nodes"].size(); ++i) time_in_course(t["time_nodes"][i], "/tracks/time_nodes/" + std::to_string(i));
  }

  void check_paused() {
    const auto& pl = m_["paused_layout"];
    for (std::size_t i = 0; i < pl["overview_groups"].size(); ++i) {
      const auto& ids = pl["overview_groups"][i]["concept_ids"];
      for (std::size_t k = 0; k < ids.size(); ++k)
        concept_ref(ids[k], "/paused_layout/overview_groups/" + std::to_string(i) + "/concept_ids/" + std::to_string(k));
    }
    for (std::size_t i = 0; i < pl["radial_layouts"].size(); ++i) {
      const auto p = "/paused_layout/radial_layouts/" + std::to_string(i);
      const auto& r = pl["radial_layouts"][i];
      concept_ref(r["concept_id"], p + "/concept_id");
      for (std::size_t k = 0; k < r["inner_markers"].size(); ++k)
        concept_ref(r["inner_markers"][k]["target_concept"], p + "/inner_markers/" + std::to_string(k) + "/target_concept");
      for (std::size_t k = 0; k < r["outer_ring"].size(); ++k)
        element_ref(r["outer_ring"][k]["element_id"], p + "/outer_ring/" + std::to_string(k) + "/element_id");
      for (std::size_t k = 0; k < r["sub_bands"].size(); ++k)
        concept_ref(r["sub_bands"][k]["concept_id"], p + "/sub_bands/" + std::to_string(k) + "/concept_id");
      double sweep = 0;
      for (const auto& a : r["arcs"]) sweep += a["sweep_rad"].get<double>();
      if (sweep > 2 * layout::kPi + 1e-5) inconsistent(p + "/arcs", "arcs sweep more than a full turn");
    }
    for (std::size_t i = 0; i < pl["stage_assignments"].size(); ++i) {
      const auto p = "/paused_layout/stage_assignments/" + std::to_string(i);
      const auto& s = pl["stage_assignments"][i];
      concept_ref(s["concept_id"], p + "/concept_id");
      for (std::size_t k = 0; k < s["preparation"].size(); ++k) concept_ref(s["preparation"][k], p + "/preparation/" + std::to_string(k));
      std::set<std::string> seen;
      for (const auto* list : {"demonstration", "application"}) {
        for (std::size_t k = 0; k < s[list].size(); ++k) {
          const auto lp = p + "/" + list + "/" + std::to_string(k);
          element_ref(s[list][k], lp);
          if (!seen.insert(s[list][k].get<std::string>()).second) inconsistent(lp, "element listed in two stages");
        }
      }
    }
    for (std::size_t i = 0; i < pl["slide_strip"].size(); ++i)
      segment_ref(pl["slide_strip"][i]["segment_index"], "/paused_layout/slide_strip/" + std::to_string(i) + "/segment_index");
    for (std::size_t i = 0; i < pl["previews"].size(); ++i) {
      const auto p = "/paused_layout/previews/" + std::to_string(i);
      element_ref(pl["previews"][i]["element_id"], p + "/element_id");
      segment_ref(pl["previews"][i]["segment_index"], p + "/segment_index");
    }
  }

  const Json& m_;
  std::vector<Violation> out_;
  std::set<std::string> elements_, concepts_;
  std::vector<std::size_t> cue_lengths_;
  std::size_t segment_count_ = 0;
  std::int64_t duration_ = 0;
};

bool supported_version(std::string_view v) {
  return std::find(kSupportedSchemaVersions.begin(), kSupportedSchemaVersions.end(), v) !=
         kSupportedSchemaVersions.end();
}

}  // namespace

std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::kParse:
      return "Parse";
    case ViolationKind::kSchemaVersionMismatch:
      return "SchemaVersionMismatch";
    case ViolationKind::kSchema:
      return "Schema";
    case ViolationKind::kDanglingReference:
      return "DanglingReference";
    case ViolationKind::kInconsistent:
      return "Inconsistent";
  }
  return "Schema";
}

ValidationReport validate_document(const Json& m) {
  ValidationReport report;
  if (m.is_object() && m.contains("schema_version") && m["schema_version"].is_string() &&
      !supported_version(m["schema_version"].get<std::string>())) {
    report.violations.push_back({ViolationKind::kSchemaVersionMismatch, "/schema_version",
                                 "unsupported schema version \"" + m["schema_version"].get<std::string>() + "\""});
  }
  for (auto& v : manifest_schema().validate(m)) {
    report.violations.push_back({ViolationKind::kSchema, std::move(v.path), std::move(v.message)});
  }
  // Cross-references are only meaningful once the structure is sound.
  if (report.ok()) report.violations = RefChecker(m).run();
  return report;
}

ValidationReport validate_manifest(std::string_view bytes) {
  Json m;
  try {
    m = Json::parse(bytes.begin(), bytes.end());
  } catch (const Json::parse_error& e) {
    ValidationReport report;
    report.violations.push_back({ViolationKind::kParse, "@" + std::to_string(e.byte), e.what()});
    return report;
  }
  return validate_document(m);
}

Json to_json(const ValidationReport& r) {
  Json violations = Json::array();
  for (const auto& v : r.violations) {
    violations.push_back({{"kind", to_string(v.kind)}, {"path", v.path}, {"message", v.message}});
  }
  return {{"ok", r.ok()}, {"violations", violations}};
}

Json build_manifest(const ManifestInputs& in) {
  if (!supported_version(in.schema_version)) {
    throw ManifestError(ManifestErrc::kSchemaVersionMismatch,
                        "unsupported schema version \"" + in.schema_version + "\"");
  }
  const auto& segments = deref(in.segments, "segments");
  const auto& transcript = deref(in.transcript, "transcript");
  const auto& elements = deref(in.elements, "elements");
  const auto& concepts = deref(in.concepts, "concepts");
  const auto& graph = deref(in.graph, "graph");
  const auto& tracks = deref(in.tracks, "tracks");
  const auto& curve = deref(in.importance_curve, "importance curve");
  const auto& nodes = deref(in.time_nodes, "time nodes");
  const auto& overview = deref(in.overview, "overview groups");
  const auto& radials = deref(in.radial_layouts, "radial layouts");
  const auto& stages = deref(in.stages, "stage assignments");
  const auto asset = [&](std::size_t segment) {
    return segment < in.keyframe_assets.size() ? in.keyframe_assets[segment] : std::string();
  };

  Json m;
  m["schema_version"] = in.schema_version;
  m["course_id"] = in.course_id;
  m["duration_ms"] = in.duration_ms;

  m["segments"] = Json::array();
  for (const auto& s : segments) m["segments"].push_back(segment_json(s, asset(s.index)));

  m["cues"] = Json::array();
  for (std::size_t i = 0; i < transcript.cues.size(); ++i) {
    const auto& c = transcript.cues[i];
    m["cues"].push_back({{"index", i}, {"start_ms", c.start_ms}, {"end_ms", c.end_ms}, {"text", c.text}});
  }

  m["elements"] = Json::array();
  for (const auto& e : elements) m["elements"].push_back(elements::to_json(e));
  m["concepts"] = Json::array();
  for (const auto& c : concepts) m["concepts"].push_back(concepts::to_json(c));
  const auto g = relations::to_json(graph);
  m["relationships"] = g["relationships"];
  m["removed_cycle_edges"] = g["removed_cycle_edges"];
  m["topics"] = in.topics.is_null()
                    ? Json{{"topics", Json::array()}, {"segment_topics", Json::array()}, {"alpha", 1.0}, {"beta", 1.0}}
                    : in.topics;

  auto t = layout::to_json(tracks);
  Json samples = Json::array();
  for (const auto& s : curve.samples) samples.push_back({s.t_ms, s.value});
  t["importance_curve"] = {{"stride_ms", in.curve_stride_ms}, {"samples", samples}};
  t["time_nodes"] = nodes;
  m["tracks"] = t;

  Json groups = Json::array();
  for (const auto& grp : overview) {
    Json ids = Json::array();
    for (const auto i : grp.concepts) ids.push_back(concepts.at(i).id);
    groups.push_back({{"style", concepts::to_string(grp.style)},
                      {"concept_ids", ids},
                      {"topic", grp.topic ? Json(*grp.topic) : Json(nullptr)},
                      {"topic_label", grp.topic_label}});
  }
  Json radial = Json::array(), stage = Json::array(), strip = Json::array(), previews = Json::array();
  for (const auto& r : radials) radial.push_back(layout::to_json(r));
  for (const auto& s : stages) stage.push_back(layout::to_json(s));
  for (const auto& s : segments) {
    strip.push_back({{"segment_index", s.index}, {"t_ms", s.keyframe_t_ms}, {"asset", asset(s.index)}});
  }
  std::vector<const elements::Element*> glyphed;
  for (const auto& e : elements)
    if (layout::element_glyph(e.kind)) glyphed.push_back(&e);
  std::stable_sort(glyphed.begin(), glyphed.end(), [](const elements::Element* a, const elements::Element* b) {
    return std::tie(a->t_range.start_ms, a->id) < std::tie(b->t_range.start_ms, b->id);
  });
  for (const auto* e : glyphed) {
    const auto glyph = *layout::element_glyph(e->kind);
    previews.push_back({{"element_id", e->id},
                        {"kind", to_string(e->kind)},
                        {"segment_index", e->segment_index},
                        {"t_ms", e->t_range.start_ms},
                        {"bbox", bbox_json(e->bbox)},
                        {"shape", layout::to_string(glyph.shape)},
                        {"color_role", layout::to_string(glyph.color_role)},
                        {"keyframe_asset", asset(e->segment_index)}});
  }
  m["paused_layout"] = {{"overview_groups", groups},
                        {"radial_layouts", radial},
                        {"stage_assignments", stage},
                        {"slide_strip", strip},
                        {"previews", previews}};
  m["interaction_config"] = to_json(in.interaction);

  const auto report = validate_document(m);
  for (const auto& v : report.violations) {
    if (v.kind == ViolationKind::kDanglingReference)
      throw ManifestError(ManifestErrc::kDanglingReference, "dangling reference at " + v.path + ": " + v.message);
  }
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw ManifestError(ManifestErrc::kInvalid, "invalid manifest at " + v.path + ": " + v.message);
  }
  return m;
}

std::string serialize_manifest(const Json& manifest) { return canonical_dump(manifest); }

}  // namespace moocaug::manifest

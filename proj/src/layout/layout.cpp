#include "moocaug/layout/layout.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

namespace moocaug::layout {
namespace {

using concepts::Concept;
using relations::RelationKind;

const Concept* find_concept(const CourseView& course, std::string_view id) {
  for (const auto& c : *course.concepts)
    if (c.id == id) return &c;
  return nullptr;
}

bool in_spans(const std::vector<Interval>& spans, std::int64_t t) {
  return std::any_of(spans.begin(), spans.end(), [&](const Interval& s) { return s.contains(t); });
}

bool overlaps_spans(const std::vector<Interval>& spans, const Interval& r) {
  return std::any_of(spans.begin(), spans.end(), [&](const Interval& s) { return s.overlaps(r); });
}

// Time of the related concept's first mention inside this concept's spans,
// else its first mention.
std::int64_t first_co_mention(const Concept& self, const Concept& other) {
  for (const auto& m : other.mentions)
    if (in_spans(self.spans, m.t_ms)) return m.t_ms;
  return other.first_mention_ms();
}

std::vector<const elements::Element*> by_time(std::vector<const elements::Element*> els) {
  std::sort(els.begin(), els.end(), [](const elements::Element* a, const elements::Element* b) {
    return std::tie(a->t_range.start_ms, a->id) < std::tie(b->t_range.start_ms, b->id);
  });
  return els;
}

}  // namespace

std::string_view to_string(GlyphShape s) {
  switch (s) {
    case GlyphShape::kCircle:
      return "Circle";
    case GlyphShape::kRectangle:
      return "Rectangle";
    case GlyphShape::kHexagon:
      return "Hexagon";
    case GlyphShape::kTriangle:
      return "Triangle";
  }
  return "Circle";
}

std::string_view to_string(ColorRole c) {
  switch (c) {
    case ColorRole::kConceptBlue:
      return "ConceptBlue";
    case ColorRole::kFigureTableGreen:
      return "FigureTableGreen";
    case ColorRole::kEquationCodeRed:
      return "EquationCodeRed";
    case ColorRole::kExampleTestYellow:
      return "ExampleTestYellow";
  }
  return "ConceptBlue";
}

std::optional<GlyphSpec> element_glyph(ElementKind kind) {
  switch (kind) {
    case ElementKind::kText:
      return kConceptGlyph;
    case ElementKind::kFigure:
    case ElementKind::kTable:
      return GlyphSpec{GlyphShape::kRectangle, ColorRole::kFigureTableGreen};
    case ElementKind::kEquation:
    case ElementKind::kCodeBlock:
      return GlyphSpec{GlyphShape::kHexagon, ColorRole::kEquationCodeRed};
    case ElementKind::kExample:
    case ElementKind::kTest:
      return GlyphSpec{GlyphShape::kTriangle, ColorRole::kExampleTestYellow};
    case ElementKind::kTeacherImage:
    case ElementKind::kSubtitle:
      return std::nullopt;
  }
  return std::nullopt;
}

double timeline_angle(std::int64_t t_ms, std::int64_t duration_ms) {
  if (duration_ms <= 0 || t_ms < 0 || t_ms > duration_ms) {
    throw LayoutError(LayoutErrc::kOutOfRange, "timeline_angle: t = " + std::to_string(t_ms) +
                                                   " outside [0, " + std::to_string(duration_ms) + "]");
  }
  if (t_ms == duration_ms) return -kPi / 2;
  return -kPi / 2 + 2 * kPi * static_cast<double>(t_ms) / static_cast<double>(duration_ms);
}

std::size_t importance_step(double importance, const std::vector<double>& course_importances) {
  if (course_importances.empty()) return kImportanceRamp.size() - 1;
  std::size_t step = 0;
  for (int i = 1; i <= 4; ++i) {
    if (importance >= structure::quantile(course_importances, i / 5.0)) ++step;
  }
  return step;
}

double radius_norm(std::int64_t duration_ms, std::int64_t max_duration_ms, const LayoutOptions& options) {
  if (max_duration_ms <= 0) return options.r_min;
  const double f = std::clamp(static_cast<double>(duration_ms) / static_cast<double>(max_duration_ms), 0.0, 1.0);
  return options.r_min + (options.r_max - options.r_min) * std::sqrt(f);
}

StageAssignment stage_assign(std::size_t concept_index, const CourseView& course, const LayoutOptions& options) {
  const auto& self = (*course.concepts)[concept_index];
  const auto& g = *course.graph;
  StageAssignment s;
  s.concept_id = self.id;

  std::vector<const Concept*> prep;
  for (const auto& r : g.relationships) {
    if (r.kind == RelationKind::kSimilarity) continue;
    std::string_view other;
    if (r.src == self.id) other = r.dst;
    else if (r.dst == self.id) other = r.src;
    else continue;
    const auto* c = find_concept(course, other);
    if (c && c->first_mention_ms() < self.first_mention_ms() &&
        std::find(prep.begin(), prep.end(), c) == prep.end()) {
      prep.push_back(c);
    }
  }
  std::sort(prep.begin(), prep.end(), [](const Concept* a, const Concept* b) {
    return std::make_pair(a->first_mention_ms(), a->id) < std::make_pair(b->first_mention_ms(), b->id);
  });
  for (const auto* c : prep) s.preparation.push_back(c->id);

  std::vector<const elements::Element*> demo, app;
  for (const auto& e : *course.elements) {
    if (is_basic(e.kind) && overlaps_spans(self.spans, e.t_range)) {
      demo.push_back(&e);
    } else if (e.kind == ElementKind::kExample || e.kind == ElementKind::kTest) {
      const bool follows = std::any_of(self.spans.begin(), self.spans.end(), [&](const Interval& sp) {
        return e.t_range.start_ms >= sp.end_ms && e.t_range.start_ms - sp.end_ms <= options.follow_ms;
      });
      if (follows) app.push_back(&e);
    }
  }
  for (const auto* e : by_time(demo)) s.demonstration.push_back(e->id);
  for (const auto* e : by_time(app)) s.application.push_back(e->id);
  return s;
}

RadialLayout radial_layout(std::size_t concept_index, const CourseView& course, const LayoutOptions& options) {
  const auto& all = *course.concepts;
  const auto& self = all[concept_index];
  const auto& g = *course.graph;
  const auto duration = course.duration_ms;
  RadialLayout r;
  r.concept_id = self.id;

  std::vector<double> importances;
  std::int64_t max_duration = 0;
  for (const auto& c : all) {
    importances.push_back(c.importance);
    max_duration = std::max(max_duration, c.duration_ms);
  }
  r.color_step = importance_step(self.importance, importances);
  r.center_color = std::string(kImportanceRamp[r.color_step]);
  r.radius_px_norm = radius_norm(self.duration_ms, max_duration, options);

  for (const auto& rel : g.relationships) {
    if (rel.kind == RelationKind::kInclusion) continue;
    std::string_view other;
    if (rel.src == self.id) other = rel.dst;
    else if (rel.dst == self.id) other = rel.src;
    else continue;
    const auto* c = find_concept(course, other);
    if (!c) continue;
    InnerMarker m;
    m.t_ms = std::clamp<std::int64_t>(first_co_mention(self, *c), 0, duration);
    m.angle_rad = timeline_angle(m.t_ms, duration);
    const bool assoc = rel.kind == RelationKind::kAssociation;
    m.kind = assoc ? MarkerKind::kAssocCircleLight : MarkerKind::kSimCircleDark;
    m.connector = assoc ? Connector::kCurve : Connector::kOrthogonalTick;
    m.target_concept = c->id;
    r.inner_markers.push_back(std::move(m));
  }
  std::stable_sort(r.inner_markers.begin(), r.inner_markers.end(), [](const InnerMarker& a, const InnerMarker& b) {
    return std::tie(a.angle_rad, a.target_concept) < std::tie(b.angle_rad, b.target_concept);
  });

  for (const auto& span : merge_intervals(self.spans)) {
    const Interval clipped{std::clamp<std::int64_t>(span.start_ms, 0, duration),
                           std::clamp<std::int64_t>(span.end_ms, 0, duration)};
    if (clipped.length() <= 0) continue;
    r.arcs.push_back({timeline_angle(clipped.start_ms, duration), timeline_angle(clipped.end_ms, duration),
                      2 * kPi * static_cast<double>(clipped.length()) / static_cast<double>(duration), clipped});
  }

  const auto stage = stage_assign(concept_index, course, options);
  std::unordered_map<std::string, const elements::Element*> by_id;
  for (const auto& e : *course.elements) by_id.emplace(e.id, &e);
  for (const auto& id : stage.demonstration) {
    const auto glyph = element_glyph(by_id.at(id)->kind);
    if (glyph) r.outer_ring.push_back({id, *glyph});
  }

  std::vector<const Concept*> children;
  for (const auto& rel : g.relationships) {
    if (rel.kind != RelationKind::kInclusion || rel.src != self.id) continue;
    if (const auto* c = find_concept(course, rel.dst)) children.push_back(c);
  }
  std::sort(children.begin(), children.end(), [](const Concept* a, const Concept* b) {
    return std::make_pair(a->first_mention_ms(), a->id) < std::make_pair(b->first_mention_ms(), b->id);
  });
  for (const auto* c : children) {
    r.sub_bands.push_back({c->id, static_cast<double>(c->first_mention_ms()) / static_cast<double>(duration),
                           static_cast<double>(c->duration_ms) / static_cast<double>(duration)});
  }
  return r;
}

std::array<std::array<double, 2>, kSlotCount> slot_positions(const BBox& box, double margin) {
  std::array<std::array<double, 2>, kSlotCount> out{};
  const double rx = box.w / 2 + margin, ry = box.h / 2 + margin;
  for (std::size_t j = 0; j < kSlotCount; ++j) {
    // y grows downward, so increasing angle runs clockwise on screen.
    const double theta = -kPi / 2 + static_cast<double>(j) * 2 * kPi / static_cast<double>(kSlotCount);
    out[j] = {box.center_x() + rx * std::cos(theta), box.center_y() + ry * std::sin(theta)};
  }
  return out;
}

std::vector<std::size_t> assign_slots(const BBox& box, const std::vector<std::array<double, 2>>& targets,
                                      double margin) {
  const auto slots = slot_positions(box, margin);
  std::array<bool, kSlotCount> taken{};
  std::vector<std::size_t> out;
  for (const auto& t : targets) {
    if (out.size() == kSlotCount) break;
    std::array<std::size_t, kSlotCount> order{};
    std::iota(order.begin(), order.end(), 0);
    auto dist2 = [&](std::size_t j) {
      const double dx = slots[j][0] - t[0], dy = slots[j][1] - t[1];
      return dx * dx + dy * dy;
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist2(a) < dist2(b); });
    for (const auto j : order) {
      if (taken[j]) continue;
      taken[j] = true;
      out.push_back(j);
      break;
    }
  }
  return out;
}

TrackSet highlight_tracks(const CourseView& course, const LayoutOptions& options, const TextAnalyzer& analyzer) {
  const auto& all = *course.concepts;
  const auto& els = *course.elements;
  TrackSet tracks;

  for (const auto& e : els) {
    if (const auto glyph = element_glyph(e.kind)) tracks.highlights.push_back({e.id, e.t_range, e.bbox, glyph->color_role});
  }

  // Per cue: the most important concept mentioned in it (ties: lower index).
  std::vector<std::optional<std::size_t>> cue_concept(course.transcript->cues.size());
  for (std::size_t c = 0; c < all.size(); ++c) {
    for (const auto& m : all[c].mentions) {
      if (!m.cue_index || *m.cue_index >= cue_concept.size()) continue;
      auto& slot = cue_concept[*m.cue_index];
      if (!slot || all[c].importance > all[*slot].importance) slot = c;
    }
  }
  for (std::size_t i = 0; i < cue_concept.size(); ++i) {
    if (!cue_concept[i]) continue;
    const auto& c = all[*cue_concept[i]];
    const auto needle = split_words(analyzer.canonical(c.label));
    const auto tokens = analyzer.analyze(course.transcript->cues[i].text);
    EmphasisSpan span{i, c.id, {}};
    for (std::size_t k = 0; !needle.empty() && k + needle.size() <= tokens.size(); ++k) {
      bool match = true;
      for (std::size_t n = 0; n < needle.size() && match; ++n) match = tokens[k + n].lemma == needle[n];
      if (!match) continue;
      span.ranges.push_back({tokens[k].range.begin, tokens[k + needle.size() - 1].range.end});
      k += needle.size() - 1;
    }
    if (!span.ranges.empty()) tracks.subtitle_emphasis.push_back(std::move(span));
  }

  std::unordered_map<std::string, std::size_t> concept_index;
  for (std::size_t c = 0; c < all.size(); ++c) concept_index.emplace(all[c].id, c);
  std::unordered_map<std::string, const elements::Element*> by_id;
  for (const auto& e : els) by_id.emplace(e.id, &e);
  std::map<std::size_t, StageAssignment> stages;
  for (const auto& e : els) {
    if (!element_glyph(e.kind)) continue;
    std::optional<std::size_t> active;
    for (const auto& id : e.concept_ids) {
      const auto it = concept_index.find(id);
      if (it == concept_index.end()) continue;
      if (!active || all[it->second].importance > all[*active].importance) active = it->second;
    }
    if (!active) active = concepts::active_concept(all, e.t_range.start_ms);
    if (!active) continue;
    auto st = stages.find(*active);
    if (st == stages.end()) st = stages.emplace(*active, stage_assign(*active, course, options)).first;

    std::vector<const elements::Element*> related;
    for (const auto* list : {&st->second.demonstration, &st->second.application})
      for (const auto& id : *list)
        if (id != e.id && element_glyph(by_id.at(id)->kind)) related.push_back(by_id.at(id));
    related = by_time(related);
    std::vector<std::array<double, 2>> targets;
    for (const auto* r : related) targets.push_back({r->bbox.center_x(), r->bbox.center_y()});
    const auto slots = assign_slots(e.bbox, targets, options.slot_margin);
    const auto positions = slot_positions(e.bbox, options.slot_margin);
    FocusCluster cluster{e.id, all[*active].id, {}};
    for (std::size_t k = 0; k < slots.size(); ++k) {
      cluster.icons.push_back({related[k]->id, *element_glyph(related[k]->kind), slots[k], positions[slots[k]][0],
                               positions[slots[k]][1]});
    }
    tracks.focus_clusters.push_back(std::move(cluster));
  }
  return tracks;
}

Json to_json(const RadialLayout& r) {
  Json markers = Json::array(), arcs = Json::array(), ring = Json::array(), bands = Json::array();
  for (const auto& m : r.inner_markers) {
    markers.push_back({{"angle_rad", m.angle_rad},
                       {"t_ms", m.t_ms},
                       {"kind", m.kind == MarkerKind::kAssocCircleLight ? "AssocCircleLight" : "SimCircleDark"},
                       {"connector", m.connector == Connector::kCurve ? "Curve" : "OrthogonalTick"},
                       {"target_concept", m.target_concept}});
  }
  for (const auto& a : r.arcs) {
    arcs.push_back({{"start_angle", a.start_angle},
                    {"end_angle", a.end_angle},
                    {"sweep_rad", a.sweep_rad},
                    {"interval_ms", {a.interval.start_ms, a.interval.end_ms}}});
  }
  for (const auto& e : r.outer_ring) {
    ring.push_back({{"element_id", e.element_id},
                    {"shape", to_string(e.glyph.shape)},
                    {"color_role", to_string(e.glyph.color_role)}});
  }
  for (const auto& b : r.sub_bands) {
    bands.push_back({{"concept_id", b.concept_id}, {"offset_norm", b.offset_norm}, {"length_norm", b.length_norm}});
  }
  return {{"concept_id", r.concept_id}, {"center_color", r.center_color}, {"color_step", r.color_step},
          {"radius_px_norm", r.radius_px_norm}, {"inner_markers", markers}, {"arcs", arcs},
          {"outer_ring", ring}, {"sub_bands", bands}};
}

Json to_json(const StageAssignment& s) {
  return {{"concept_id", s.concept_id},
          {"preparation", s.preparation},
          {"demonstration", s.demonstration},
          {"application", s.application}};
}

Json to_json(const TrackSet& t) {
  Json boxes = Json::array(), emphasis = Json::array(), clusters = Json::array();
  for (const auto& b : t.highlights) {
    boxes.push_back({{"element_id", b.element_id},
                     {"t_range_ms", {b.t_range.start_ms, b.t_range.end_ms}},
                     {"bbox", {{"x", b.bbox.x}, {"y", b.bbox.y}, {"w", b.bbox.w}, {"h", b.bbox.h}}},
                     {"color_role", to_string(b.color_role)}});
  }
  for (const auto& e : t.subtitle_emphasis) {
    Json ranges = Json::array();
    for (const auto& r : e.ranges) ranges.push_back({r.begin, r.end});
    emphasis.push_back({{"cue_index", e.cue_index}, {"concept_id", e.concept_id}, {"ranges", ranges}});
  }
  for (const auto& c : t.focus_clusters) {
    Json icons = Json::array();
    for (const auto& i : c.icons) {
      icons.push_back({{"element_id", i.element_id},
                       {"shape", to_string(i.glyph.shape)},
                       {"color_role", to_string(i.glyph.color_role)},
                       {"slot", i.slot},
                       {"position", {i.x, i.y}}});
    }
    clusters.push_back({{"element_id", c.element_id}, {"concept_id", c.concept_id}, {"icons", icons}});
  }
  return {{"highlights", boxes}, {"subtitle_emphasis", emphasis}, {"focus_clusters", clusters}};
}

}  // namespace moocaug::layout

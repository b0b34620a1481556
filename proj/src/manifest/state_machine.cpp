#include "moocaug/manifest/state_machine.hpp"

#include <algorithm>

namespace moocaug::manifest {

PlayerState PlayerState::playing(std::int64_t t) { return {StateKind::kPlaying, t, {}, 0, std::nullopt}; }

PlayerState PlayerState::focused(std::int64_t t, std::string target, std::int64_t entered_at) {
  return {StateKind::kFocused, t, std::move(target), entered_at, std::nullopt};
}

PlayerState PlayerState::paused(std::int64_t t, std::optional<Anchor> anchor) {
  return {StateKind::kPausedFull, t, {}, 0, std::move(anchor)};
}

InteractionEvent InteractionEvent::hover_start(std::string element) {
  return {EventKind::kHoverStart, std::move(element), 0, 0, {}};
}
InteractionEvent InteractionEvent::hover_dwell(std::string element, std::int64_t dwell_ms) {
  return {EventKind::kHoverDwellElapsed, std::move(element), dwell_ms, 0, {}};
}
InteractionEvent InteractionEvent::hover_end() { return {EventKind::kHoverEnd, {}, 0, 0, {}}; }
InteractionEvent InteractionEvent::click(std::string element) {
  return {EventKind::kClickElement, std::move(element), 0, 0, {}};
}
InteractionEvent InteractionEvent::pause_button() { return {EventKind::kPauseButton, {}, 0, 0, {}}; }
InteractionEvent InteractionEvent::play_button() { return {EventKind::kPlayButton, {}, 0, 0, {}}; }
InteractionEvent InteractionEvent::seek(std::int64_t t) { return {EventKind::kSeek, {}, 0, t, {}}; }
InteractionEvent InteractionEvent::time_node_click(std::int64_t t) {
  return {EventKind::kTimeNodeClick, {}, 0, t, {}};
}
InteractionEvent InteractionEvent::concept_anchor_click(std::string concept_id, std::int64_t t) {
  return {EventKind::kConceptAnchorClick, {}, 0, t, std::move(concept_id)};
}

namespace {

constexpr std::array<std::string_view, 3> kStateNames = {"Playing", "Focused", "PausedFull"};
constexpr std::array<std::string_view, 9> kEventNames = {
    "HoverStart", "HoverDwellElapsed", "HoverEnd", "ClickElement", "PauseButton",
    "PlayButton", "Seek",              "TimeNodeClick", "ConceptAnchorClick"};
constexpr std::array<std::string_view, 7> kActionNames = {"EnterFocused", "ExitToPlaying", "PauseOnElement",
                                                          "PauseOnActiveConcept", "Resume", "Navigate",
                                                          "UpdateTime"};

std::vector<TransitionRow> make_table() {
  using S = StateKind;
  using E = EventKind;
  using A = Action;
  std::vector<TransitionRow> rows = {
      {S::kPlaying, E::kHoverDwellElapsed, Guard::kDwellReached, S::kFocused, A::kEnterFocused},
      {S::kFocused, E::kHoverEnd, std::nullopt, S::kPlaying, A::kExitToPlaying},
      {S::kPlaying, E::kClickElement, std::nullopt, S::kPausedFull, A::kPauseOnElement},
      {S::kFocused, E::kClickElement, std::nullopt, S::kPausedFull, A::kPauseOnElement},
      {S::kPlaying, E::kPauseButton, std::nullopt, S::kPausedFull, A::kPauseOnActiveConcept},
      {S::kPausedFull, E::kPlayButton, std::nullopt, S::kPlaying, A::kResume},
      {S::kPausedFull, E::kConceptAnchorClick, std::nullopt, S::kPlaying, A::kNavigate},
  };
  for (const auto e : {E::kSeek, E::kTimeNodeClick}) {
    for (const auto s : kAllStateKinds) rows.push_back({s, e, std::nullopt, s, A::kUpdateTime});
  }
  return rows;
}

}  // namespace

std::string_view to_string(StateKind k) { return kStateNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(EventKind k) { return kEventNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(Action a) { return kActionNames[static_cast<std::size_t>(a)]; }

std::optional<StateKind> parse_state_kind(std::string_view s) {
  for (std::size_t i = 0; i < kStateNames.size(); ++i)
    if (kStateNames[i] == s) return static_cast<StateKind>(i);
  return std::nullopt;
}

std::optional<EventKind> parse_event_kind(std::string_view s) {
  for (std::size_t i = 0; i < kEventNames.size(); ++i)
    if (kEventNames[i] == s) return static_cast<EventKind>(i);
  return std::nullopt;
}

const std::vector<TransitionRow>& transition_table() {
  static const std::vector<TransitionRow> table = make_table();
  return table;
}

PlayerState transition(const PlayerState& state, const InteractionEvent& event, const TransitionContext& ctx) {
  const auto clamp_t = [&](std::int64_t t) { return std::clamp<std::int64_t>(t, 0, std::max<std::int64_t>(0, ctx.duration_ms)); };
  for (const auto& row : transition_table()) {
    if (row.from != state.kind || row.event != event.kind) continue;
    if (row.guard == Guard::kDwellReached && event.dwell_ms < ctx.config.focus_dwell_ms) continue;
    const auto t = clamp_t(state.t_ms);
    switch (row.action) {
      case Action::kEnterFocused:
        return PlayerState::focused(t, event.element, t);
      case Action::kExitToPlaying:
      case Action::kResume:
        return PlayerState::playing(t);
      case Action::kPauseOnElement:
        return PlayerState::paused(t, Anchor{AnchorKind::kElement, event.element});
      case Action::kPauseOnActiveConcept: {
        std::optional<Anchor> anchor;
        if (ctx.concepts) {
          if (const auto i = concepts::active_concept(*ctx.concepts, t))
            anchor = Anchor{AnchorKind::kConcept, (*ctx.concepts)[*i].id};
        }
        return PlayerState::paused(t, std::move(anchor));
      }
      case Action::kNavigate:
        return PlayerState::playing(clamp_t(event.t_ms));
      case Action::kUpdateTime: {
        auto next = state;
        next.t_ms = clamp_t(event.t_ms);
        return next;
      }
    }
  }
  return state;
}

Json to_json(const PlayerState& s) {
  Json j = {{"state", to_string(s.kind)}, {"t_ms", s.t_ms}};
  if (s.kind == StateKind::kFocused) {
    j["target_element"] = s.target_element;
    j["entered_at_ms"] = s.entered_at_ms;
  }
  if (s.kind == StateKind::kPausedFull) {
    j["anchor"] = s.anchor ? Json{{"kind", s.anchor->kind == AnchorKind::kConcept ? "Concept" : "Element"},
                                  {"id", s.anchor->id}}
                           : Json(nullptr);
  }
  return j;
}

Json to_json(const InteractionEvent& e) {
  Json j = {{"event", to_string(e.kind)}};
  switch (e.kind) {
    case EventKind::kHoverStart:
    case EventKind::kClickElement:
      j["element"] = e.element;
      break;
    case EventKind::kHoverDwellElapsed:
      j["element"] = e.element;
      j["dwell_ms"] = e.dwell_ms;
      break;
    case EventKind::kSeek:
    case EventKind::kTimeNodeClick:
      j["t_ms"] = e.t_ms;
      break;
    case EventKind::kConceptAnchorClick:
      j["concept"] = e.concept_id;
      j["t_ms"] = e.t_ms;
      break;
    default:
      break;
  }
  return j;
}

Json to_json(const InteractionConfig& c) {
  Json rows = Json::array();
  for (const auto& r : transition_table()) {
    rows.push_back({{"from", to_string(r.from)},
                    {"event", to_string(r.event)},
                    {"guard", r.guard ? Json("dwell_ms >= focus_dwell_ms") : Json(nullptr)},
                    {"to", to_string(r.to)},
                    {"action", to_string(r.action)}});
  }
  Json states = Json::array(), events = Json::array();
  for (const auto s : kAllStateKinds) states.push_back(to_string(s));
  for (const auto e : kAllEventKinds) events.push_back(to_string(e));
  return {{"focus_dwell_ms", c.focus_dwell_ms},
          {"hover_grace_ms", c.hover_grace_ms},
          {"follow_ms", c.follow_ms},
          {"initial_state", to_string(StateKind::kPlaying)},
          {"states", states},
          {"events", events},
          {"transition_table", rows}};
}

}  // namespace moocaug::manifest

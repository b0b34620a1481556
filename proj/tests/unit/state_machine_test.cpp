#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "moocaug/manifest/json_schema.hpp"
#include "moocaug/manifest/state_machine.hpp"
#include "state_oracle.hpp"

namespace moocaug::manifest {
namespace {

using E = InteractionEvent;
using moocaug::testing::oracle;

constexpr std::int64_t kDuration = 600000;

std::vector<concepts::Concept> two_concepts() {
  concepts::Concept a;
  a.id = "c-01";
  a.spans = {{0, 100000}};
  a.importance = 0.4;
  concepts::Concept b;
  b.id = "c-02";
  b.spans = {{50000, 200000}};
  b.importance = 0.9;
  return {a, b};
}

struct Fixture {
  std::vector<concepts::Concept> concepts = two_concepts();
  TransitionContext ctx{{}, kDuration, &concepts};
};

std::vector<PlayerState> sample_states() {
  return {PlayerState::playing(0),
          PlayerState::playing(75000),
          PlayerState::focused(75000, "e-3", 70000),
          PlayerState::paused(75000, Anchor{AnchorKind::kConcept, "c-02"}),
          PlayerState::paused(300000, std::nullopt)};
}

std::vector<InteractionEvent> sample_events() {
  return {E::hover_start("e-1"),      E::hover_dwell("e-1", 0),     E::hover_dwell("e-1", 2999),
          E::hover_dwell("e-1", 3000), E::hover_dwell("e-1", 9000), E::hover_end(),
          E::click("e-2"),            E::pause_button(),            E::play_button(),
          E::seek(1234),              E::seek(-50),                 E::seek(kDuration + 1),
          E::time_node_click(42000),  E::concept_anchor_click("c-01", 5000),
          E::concept_anchor_click("c-01", kDuration * 2)};
}

TEST(Transition, ExhaustiveAgainstOracle) {
  const Fixture f;
  std::set<std::pair<StateKind, EventKind>> covered;
  for (const auto& s : sample_states()) {
    for (const auto& e : sample_events()) {
      EXPECT_EQ(transition(s, e, f.ctx), oracle(s, e, f.ctx))
          << to_json(s).dump() << " + " << to_json(e).dump();
      covered.insert({s.kind, e.kind});
    }
  }
  EXPECT_EQ(covered.size(), kAllStateKinds.size() * kAllEventKinds.size());
}

TEST(Transition, KindTable) {
  // Resulting state kind per (state, event); dwell events reach the threshold.
  using S = StateKind;
  const Fixture f;
  const std::map<std::pair<S, EventKind>, S> expected = {
      {{S::kPlaying, EventKind::kHoverStart}, S::kPlaying},
      {{S::kPlaying, EventKind::kHoverDwellElapsed}, S::kFocused},
      {{S::kPlaying, EventKind::kHoverEnd}, S::kPlaying},
      {{S::kPlaying, EventKind::kClickElement}, S::kPausedFull},
      {{S::kPlaying, EventKind::kPauseButton}, S::kPausedFull},
      {{S::kPlaying, EventKind::kPlayButton}, S::kPlaying},
      {{S::kPlaying, EventKind::kSeek}, S::kPlaying},
      {{S::kPlaying, EventKind::kTimeNodeClick}, S::kPlaying},
      {{S::kPlaying, EventKind::kConceptAnchorClick}, S::kPlaying},
      {{S::kFocused, EventKind::kHoverStart}, S::kFocused},
      {{S::kFocused, EventKind::kHoverDwellElapsed}, S::kFocused},
      {{S::kFocused, EventKind::kHoverEnd}, S::kPlaying},
      {{S::kFocused, EventKind::kClickElement}, S::kPausedFull},
      {{S::kFocused, EventKind::kPauseButton}, S::kFocused},
      {{S::kFocused, EventKind::kPlayButton}, S::kFocused},
      {{S::kFocused, EventKind::kSeek}, S::kFocused},
      {{S::kFocused, EventKind::kTimeNodeClick}, S::kFocused},
      {{S::kFocused, EventKind::kConceptAnchorClick}, S::kFocused},
      {{S::kPausedFull, EventKind::kHoverStart}, S::kPausedFull},
      {{S::kPausedFull, EventKind::kHoverDwellElapsed}, S::kPausedFull},
      {{S::kPausedFull, EventKind::kHoverEnd}, S::kPausedFull},
      {{S::kPausedFull, EventKind::kClickElement}, S::kPausedFull},
      {{S::kPausedFull, EventKind::kPauseButton}, S::kPausedFull},
      {{S::kPausedFull, EventKind::kPlayButton}, S::kPlaying},
      {{S::kPausedFull, EventKind::kSeek}, S::kPausedFull},
      {{S::kPausedFull, EventKind::kTimeNodeClick}, S::kPausedFull},
      {{S::kPausedFull, EventKind::kConceptAnchorClick}, S::kPlaying},
  };
  const std::map<EventKind, InteractionEvent> events = {
      {EventKind::kHoverStart, E::hover_start("e-1")},       {EventKind::kHoverDwellElapsed, E::hover_dwell("e-1", 3000)},
      {EventKind::kHoverEnd, E::hover_end()},                {EventKind::kClickElement, E::click("e-1")},
      {EventKind::kPauseButton, E::pause_button()},          {EventKind::kPlayButton, E::play_button()},
      {EventKind::kSeek, E::seek(10)},                       {EventKind::kTimeNodeClick, E::time_node_click(10)},
      {EventKind::kConceptAnchorClick, E::concept_anchor_click("c-01", 10)},
  };
  const std::map<S, PlayerState> states = {{S::kPlaying, PlayerState::playing(60000)},
                                           {S::kFocused, PlayerState::focused(60000, "e-9", 60000)},
                                           {S::kPausedFull, PlayerState::paused(60000, std::nullopt)}};
  ASSERT_EQ(expected.size(), 27u);
  for (const auto& [key, to] : expected) {
    EXPECT_EQ(transition(states.at(key.first), events.at(key.second), f.ctx).kind, to)
        << to_string(key.first) << " + " << to_string(key.second);
  }
}

TEST(Transition, DwellBoundary) {
  const Fixture f;
  const auto s = PlayerState::playing(12000);
  EXPECT_EQ(transition(s, E::hover_dwell("e-1", 2999), f.ctx), s);
  const auto focused = transition(s, E::hover_dwell("e-1", 3000), f.ctx);
  EXPECT_EQ(focused, PlayerState::focused(12000, "e-1", 12000));
}

TEST(Transition, DwellBelowThresholdNeverLeavesPlaying) {
  const Fixture f;
  std::mt19937_64 rng(99);
  for (int i = 0; i < 5000; ++i) {
    const auto s = PlayerState::playing(static_cast<std::int64_t>(rng() % kDuration));
    const auto e = E::hover_dwell("e-" + std::to_string(rng() % 5), static_cast<std::int64_t>(rng() % 3000));
    EXPECT_EQ(transition(s, e, f.ctx), s);
  }
}

TEST(Transition, DwellThresholdIsConfigurable) {
  Fixture f;
  f.ctx.config.focus_dwell_ms = 1200;
  EXPECT_EQ(transition(PlayerState::playing(0), E::hover_dwell("e-1", 1199), f.ctx).kind, StateKind::kPlaying);
  EXPECT_EQ(transition(PlayerState::playing(0), E::hover_dwell("e-1", 1200), f.ctx).kind, StateKind::kFocused);
}

TEST(Transition, PaperExamples) {
  const Fixture f;
  const auto focused = PlayerState::focused(5000, "e-1", 4000);
  EXPECT_EQ(transition(focused, E::click("e-7"), f.ctx), PlayerState::paused(5000, Anchor{AnchorKind::kElement, "e-7"}));
  const auto paused = PlayerState::paused(5000, Anchor{AnchorKind::kElement, "e-7"});
  EXPECT_EQ(transition(paused, E::hover_start("e-2"), f.ctx), paused);
}

TEST(Transition, PauseAnchorsTheActiveConcept) {
  const Fixture f;
  EXPECT_EQ(transition(PlayerState::playing(10000), E::pause_button(), f.ctx).anchor,
            (Anchor{AnchorKind::kConcept, "c-01"}));
  EXPECT_EQ(transition(PlayerState::playing(60000), E::pause_button(), f.ctx).anchor,
            (Anchor{AnchorKind::kConcept, "c-02"}));  // both cover t; c-02 is more important
  EXPECT_EQ(transition(PlayerState::playing(400000), E::pause_button(), f.ctx).anchor, std::nullopt);
}

TEST(Transition, SeekKeepsTheStateFamily) {
  const Fixture f;
  const auto paused = PlayerState::paused(1000, Anchor{AnchorKind::kConcept, "c-01"});
  auto moved = transition(paused, E::seek(kDuration + 500), f.ctx);
  EXPECT_EQ(moved.kind, StateKind::kPausedFull);
  EXPECT_EQ(moved.t_ms, kDuration);
  EXPECT_EQ(moved.anchor, paused.anchor);
  moved = transition(PlayerState::focused(1000, "e-1", 900), E::time_node_click(-7), f.ctx);
  EXPECT_EQ(moved, PlayerState::focused(0, "e-1", 900));
  EXPECT_EQ(transition(paused, E::concept_anchor_click("c-02", 77000), f.ctx), PlayerState::playing(77000));
}

InteractionEvent random_event(std::mt19937_64& rng) {
  const auto element = "e-" + std::to_string(rng() % 6);
  const auto t = static_cast<std::int64_t>(rng() % (kDuration + 200000)) - 100000;
  switch (rng() % 9) {
    case 0:
      return E::hover_start(element);
    case 1:
      return E::hover_dwell(element, static_cast<std::int64_t>(rng() % 6000));
    case 2:
      return E::hover_end();
    case 3:
      return E::click(element);
    case 4:
      return E::pause_button();
    case 5:
      return E::play_button();
    case 6:
      return E::seek(t);
    case 7:
      return E::time_node_click(t);
    default:
      return E::concept_anchor_click("c-0" + std::to_string(1 + rng() % 2), t);
  }
}

TEST(Transition, RandomWalkStaysDefined) {
  const Fixture f;
  std::mt19937_64 rng(2024);
  auto s = PlayerState::playing(0);
  std::vector<PlayerState> trace;
  for (int step = 0; step < 10000; ++step) {
    const auto e = random_event(rng);
    const auto next = transition(s, e, f.ctx);
    ASSERT_EQ(next, oracle(s, e, f.ctx));
    ASSERT_GE(next.t_ms, 0);
    ASSERT_LE(next.t_ms, kDuration);
    if (next.kind == StateKind::kFocused) { ASSERT_FALSE(next.target_element.empty()); }
    if (next.kind != StateKind::kFocused) { ASSERT_TRUE(next.target_element.empty()); }
    if (next.kind != StateKind::kPausedFull) { ASSERT_FALSE(next.anchor.has_value()); }
    trace.push_back(next);
    s = next;
  }
  std::mt19937_64 again(2024);
  s = PlayerState::playing(0);
  for (const auto& expected : trace) {
    s = transition(s, random_event(again), f.ctx);
    ASSERT_EQ(s, expected);
  }
}

// Interprets the serialized table the way an embedding client would.
struct TableInterpreter {
  Json config;
  const TransitionContext& ctx;

  Json step(const Json& state, const Json& event) const {
    const auto clamp = [&](std::int64_t t) { return std::clamp<std::int64_t>(t, 0, ctx.duration_ms); };
    for (const auto& row : config["transition_table"]) {
      if (row["from"] != state["state"] || row["event"] != event["event"]) continue;
      if (!row["guard"].is_null() && event["dwell_ms"].get<std::int64_t>() < config["focus_dwell_ms"].get<std::int64_t>())
        continue;
      const auto action = row["action"].get<std::string>();
      const auto t = state["t_ms"].get<std::int64_t>();
      Json next = {{"state", row["to"]}, {"t_ms", t}};
      if (action == "EnterFocused") {
        next["target_element"] = event["element"];
        next["entered_at_ms"] = t;
      } else if (action == "PauseOnElement") {
        next["anchor"] = {{"kind", "Element"}, {"id", event["element"]}};
      } else if (action == "PauseOnActiveConcept") {
        const auto i = concepts::active_concept(*ctx.concepts, t);
        next["anchor"] = i ? Json{{"kind", "Concept"}, {"id", (*ctx.concepts)[*i].id}} : Json(nullptr);
      } else if (action == "Navigate") {
        next["t_ms"] = clamp(event["t_ms"].get<std::int64_t>());
      } else if (action == "UpdateTime") {
        next = state;
        next["t_ms"] = clamp(event["t_ms"].get<std::int64_t>());
      }
      return next;
    }
    return state;
  }
};

TEST(TransitionTable, SerializedTableReplaysTheEngine) {
  const Fixture f;
  const TableInterpreter interp{to_json(f.ctx.config), f.ctx};
  std::mt19937_64 rng(7);
  for (int log = 0; log < 5; ++log) {
    auto s = PlayerState::playing(0);
    Json js = to_json(s);
    for (int step = 0; step < 2000; ++step) {
      const auto e = random_event(rng);
      s = transition(s, e, f.ctx);
      js = interp.step(js, to_json(e));
      ASSERT_EQ(js, to_json(s)) << "log " << log << " step " << step;
    }
  }
}

TEST(TransitionTable, ShapeAndNames) {
  const auto& table = transition_table();
  EXPECT_EQ(table.size(), 13u);
  const auto j = to_json(InteractionConfig{});
  EXPECT_EQ(j["focus_dwell_ms"], 3000);
  EXPECT_EQ(j["hover_grace_ms"], 500);
  EXPECT_EQ(j["follow_ms"], 60000);
  EXPECT_EQ(j["states"].size(), 3u);
  EXPECT_EQ(j["events"].size(), 9u);
  for (const auto k : kAllStateKinds) EXPECT_EQ(parse_state_kind(to_string(k)), k);
  for (const auto k : kAllEventKinds) EXPECT_EQ(parse_event_kind(to_string(k)), k);
  EXPECT_FALSE(parse_state_kind("Paused").has_value());
  const auto defs = Json::parse(manifest_schema_text())["$defs"];
  const JsonSchema section(Json{{"$ref", "#/$defs/interaction_config"}, {"$defs", defs}});
  EXPECT_TRUE(section.validate(j).empty());
}

}  // namespace
}  // namespace moocaug::manifest

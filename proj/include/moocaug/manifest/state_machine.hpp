#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "moocaug/common/canonical_json.hpp"
#include "moocaug/concepts/concepts.hpp"

namespace moocaug::manifest {

enum class StateKind { kPlaying, kFocused, kPausedFull };
enum class AnchorKind { kConcept, kElement };

inline constexpr std::array<StateKind, 3> kAllStateKinds = {StateKind::kPlaying, StateKind::kFocused,
                                                            StateKind::kPausedFull};

struct Anchor {
  AnchorKind kind = AnchorKind::kConcept;
  std::string id;
  friend bool operator==(const Anchor&, const Anchor&) = default;
};

// One struct for the three states; fields outside the state's own set stay
// at their defaults.
struct PlayerState {
  StateKind kind = StateKind::kPlaying;
  std::int64_t t_ms = 0;
  std::string target_element;      // Focused
  std::int64_t entered_at_ms = 0;  // Focused
  std::optional<Anchor> anchor;    // PausedFull; empty when nothing was active

  static PlayerState playing(std::int64_t t);
  static PlayerState focused(std::int64_t t, std::string target, std::int64_t entered_at);
  static PlayerState paused(std::int64_t t, std::optional<Anchor> anchor);

  friend bool operator==(const PlayerState&, const PlayerState&) = default;
};

enum class EventKind {
  kHoverStart,
  kHoverDwellElapsed,
  kHoverEnd,
  kClickElement,
  kPauseButton,
  kPlayButton,
  kSeek,
  kTimeNodeClick,
  kConceptAnchorClick,
};

inline constexpr std::array<EventKind, 9> kAllEventKinds = {
    EventKind::kHoverStart, EventKind::kHoverDwellElapsed, EventKind::kHoverEnd,
    EventKind::kClickElement, EventKind::kPauseButton,     EventKind::kPlayButton,
    EventKind::kSeek,       EventKind::kTimeNodeClick,     EventKind::kConceptAnchorClick,
};

struct InteractionEvent {
  EventKind kind = EventKind::kHoverEnd;
  std::string element;    // HoverStart, HoverDwellElapsed, ClickElement
  std::int64_t dwell_ms = 0;
  std::int64_t t_ms = 0;  // Seek, TimeNodeClick, ConceptAnchorClick
  std::string concept_id;  // ConceptAnchorClick

  static InteractionEvent hover_start(std::string element);
  static InteractionEvent hover_dwell(std::string element, std::int64_t dwell_ms);
  static InteractionEvent hover_end();
  static InteractionEvent click(std::string element);
  static InteractionEvent pause_button();
  static InteractionEvent play_button();
  static InteractionEvent seek(std::int64_t t);
  static InteractionEvent time_node_click(std::int64_t t);
  static InteractionEvent concept_anchor_click(std::string concept_id, std::int64_t t);
};

std::string_view to_string(StateKind k);
std::string_view to_string(EventKind k);
std::optional<StateKind> parse_state_kind(std::string_view s);
std::optional<EventKind> parse_event_kind(std::string_view s);

struct InteractionConfig {
  std::int64_t focus_dwell_ms = 3000;
  // The pointer tracker emits HoverEnd only after the pointer has stayed
  // off the target this long; the machine itself sees the debounced event.
  std::int64_t hover_grace_ms = 500;
  std::int64_t follow_ms = 60000;
};

enum class Guard { kDwellReached };

enum class Action {
  kEnterFocused,
  kExitToPlaying,
  kPauseOnElement,
  kPauseOnActiveConcept,
  kResume,
  kNavigate,
  kUpdateTime,
};

std::string_view to_string(Action a);

struct TransitionRow {
  StateKind from;
  EventKind event;
  std::optional<Guard> guard;
  StateKind to;
  Action action;
};

// The first matching row fires; a (state, event) with no matching row
// leaves the state unchanged.
const std::vector<TransitionRow>& transition_table();

struct TransitionContext {
  InteractionConfig config;
  std::int64_t duration_ms = 0;
  const std::vector<concepts::Concept>* concepts = nullptr;  // for PauseButton
};

// Total and deterministic. Every time the machine stores is clamped to
// [0, duration].
PlayerState transition(const PlayerState& state, const InteractionEvent& event, const TransitionContext& ctx);

Json to_json(const PlayerState& s);
Json to_json(const InteractionEvent& e);
// interaction_config section of the manifest: thresholds plus the table.
Json to_json(const InteractionConfig& c);

}  // namespace moocaug::manifest

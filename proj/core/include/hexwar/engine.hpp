#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hexwar/hexgrid.hpp"
#include "hexwar/rng.hpp"

namespace hexwar {

enum class TerrainKind : std::uint8_t { clear, rough, urban, water };

struct TerrainInfo {
  int move_cost;        // action points; 0 for impassable
  int defense_bp;       // damage multiplier in basis points (1/10000)
  bool passable;
};

constexpr TerrainInfo terrain_info(TerrainKind t) {
  switch (t) {
    case TerrainKind::clear: return {1, 10000, true};
    case TerrainKind::rough: return {2, 7500, true};
    case TerrainKind::urban: return {1, 5000, true};
    case TerrainKind::water: return {0, 0, false};
  }
  return {0, 0, false};
}

char terrain_char(TerrainKind t);
std::optional<TerrainKind> terrain_from_char(char c);

enum class Faction : std::uint8_t { blue, red };

constexpr Faction opponent(Faction f) {
  return f == Faction::blue ? Faction::red : Faction::blue;
}
// +1 for blue, -1 for red. Scores are blue-positive.
constexpr int faction_sign(Faction f) { return f == Faction::blue ? 1 : -1; }

std::string_view to_string(Faction f);
std::optional<Faction> faction_from_string(std::string_view s);

enum class UnitKind : std::uint8_t { infantry, armor };
std::string_view to_string(UnitKind k);
std::optional<UnitKind> unit_kind_from_string(std::string_view s);

using UnitId = int;

inline constexpr int kMaxStrength = 100;

struct Unit {
  UnitId id = 0;
  Faction faction = Faction::blue;
  UnitKind kind = UnitKind::infantry;
  int strength = kMaxStrength;
  HexCoord pos;
  bool acted = false;

  friend bool operator==(const Unit&, const Unit&) = default;
};

struct Objective {
  HexCoord pos;
  int value = 1;

  friend bool operator==(const Objective&, const Objective&) = default;
};

// Adjudication constants, all in basis points.
struct CombatConfig {
  bool deterministic = true;
  int attack_bp = 4000;
  int counter_bp = 2000;
  std::array<int, 3> eta_bp{7500, 10000, 12500};
};

// Static part of a game: everything that never changes during an episode.
struct Board {
  std::string name;
  int width = 0;
  int height = 0;
  int max_turns = 0;
  std::vector<TerrainKind> terrain;  // row-major, index r * width + q
  std::vector<Objective> objectives;
  CombatConfig combat;

  bool in_bounds(HexCoord c) const {
    return c.q >= 0 && c.q < width && c.r >= 0 && c.r < height;
  }
  // Off-board cells read as water.
  TerrainKind terrain_at(HexCoord c) const {
    if (!in_bounds(c)) return TerrainKind::water;
    return terrain[static_cast<std::size_t>(c.r * width + c.q)];
  }
  bool passable(HexCoord c) const { return terrain_info(terrain_at(c)).passable; }
  int max_objective_value() const;
  // Index into objectives, or -1.
  int objective_at(HexCoord c) const;
};

enum class ActionKind : std::uint8_t { pass, move, attack };

inline constexpr int kNumActions = 13;

struct Action {
  ActionKind kind = ActionKind::pass;
  int dir = 0;

  static constexpr Action pass() { return {}; }
  static constexpr Action move(int d) { return {ActionKind::move, d}; }
  static constexpr Action attack(int d) { return {ActionKind::attack, d}; }

  // 0 = pass, 1..6 = move(d), 7..12 = attack(d).
  constexpr int index() const {
    switch (kind) {
      case ActionKind::pass: return 0;
      case ActionKind::move: return 1 + dir;
      case ActionKind::attack: return 7 + dir;
    }
    return 0;
  }
  static Action from_index(int index);

  friend constexpr bool operator==(Action a, Action b) {
    return a.kind == b.kind && (a.kind == ActionKind::pass || a.dir == b.dir);
  }
};

std::string to_string(Action a);
nlohmann::json action_to_json(Action a);
// Throws std::invalid_argument on malformed input.
Action action_from_json(const nlohmann::json& j);

struct GameState {
  std::shared_ptr<const Board> board;
  std::vector<Unit> units;  // living units, ascending id
  int turn = 0;
  int score = 0;
  Faction phase = Faction::blue;
  Rng rng;

  const Unit* find(UnitId id) const;
  Unit* find(UnitId id);
  const Unit* unit_at(HexCoord c) const;
  int total_strength(Faction f) const;
  int unit_count(Faction f) const;
  bool is_terminal() const;
};

class IllegalAction : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class EventKind : std::uint8_t { pass, move, attack, destroyed, turn_end };

struct StepEvent {
  EventKind kind = EventKind::pass;
  UnitId unit = -1;
  UnitId target = -1;
  HexCoord from;
  HexCoord to;
  int damage = 0;
  int counter = 0;
  int points = 0;  // objective points at turn end (blue-positive)
};

nlohmann::json event_to_json(const StepEvent& e);

struct StepResult {
  int reward = 0;  // blue-positive score delta of this step
  std::vector<StepEvent> events;
};

// Unit whose turn it is, or nullopt at terminal states.
std::optional<UnitId> unit_on_move(const GameState& s);

// Throws std::invalid_argument when the unit is unknown or destroyed.
std::vector<Action> legal_actions(const GameState& s, UnitId unit);
bool is_legal(const GameState& s, UnitId unit, Action a);

// Applies `a` for `unit` in place. Throws IllegalAction (state unchanged)
// when the unit is not on move or the action is not legal.
StepResult step(GameState& s, UnitId unit, Action a);

// Defender damage and counter damage for an attack, before any randomness
// is drawn. Exposed for tests and tooling.
int attack_damage(int attacker_strength, TerrainKind defender_terrain,
                  int eta_bp, const CombatConfig& cfg);
int counter_damage(int defender_strength_after, int eta_bp,
                   const CombatConfig& cfg);

// Canonical, platform-independent description of the dynamic state.
nlohmann::json snapshot(const GameState& s);

}  // namespace hexwar

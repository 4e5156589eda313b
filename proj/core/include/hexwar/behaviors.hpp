#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hexwar/episode.hpp"

namespace hexwar {

enum class Posture : std::uint8_t { seize, defend, attrit };

std::string_view to_string(Posture p);
std::optional<Posture> posture_from_string(std::string_view s);

// Option-level directive handed to a unit: go to `target` and act per
// `posture` for up to `horizon` turns.
struct Subgoal {
  HexCoord target;
  Posture posture = Posture::seize;
  int horizon = 4;

  friend bool operator==(const Subgoal&, const Subgoal&) = default;
};

nlohmann::json to_json(const Subgoal& g);

// Scripted behaviors. Each returns a member of legal_actions(s, unit).
Action pass_policy(const GameState& s, UnitId unit);
Action random_policy(const GameState& s, UnitId unit, Rng& rng);
Action greedy_attack_policy(const GameState& s, UnitId unit);
Action objective_hold_policy(const GameState& s, UnitId unit);
Action goal_seek_policy(const GameState& s, UnitId unit, const Subgoal& g);

// Building blocks shared with the hierarchy.
std::optional<Action> attack_weakest_adjacent(const GameState& s, UnitId unit);
// Legal move that strictly reduces distance to `target` (lowest direction
// on ties), or Pass when none exists.
Action move_toward(const GameState& s, UnitId unit, HexCoord target);

class PassPolicy final : public Policy {
 public:
  std::string name() const override { return "pass"; }
  Action act(const GameState& s, UnitId unit) override { return pass_policy(s, unit); }
};

class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(std::uint64_t seed = 0) : rng_(seed) {}
  std::string name() const override { return "random"; }
  void reset(std::uint64_t seed) override { rng_.seed(seed); }
  Action act(const GameState& s, UnitId unit) override { return random_policy(s, unit, rng_); }

 private:
  Rng rng_;
};

class GreedyAttackPolicy final : public Policy {
 public:
  std::string name() const override { return "greedy"; }
  Action act(const GameState& s, UnitId unit) override {
    return greedy_attack_policy(s, unit);
  }
};

class ObjectiveHoldPolicy final : public Policy {
 public:
  std::string name() const override { return "hold"; }
  Action act(const GameState& s, UnitId unit) override {
    return objective_hold_policy(s, unit);
  }
};

// Goal seeking without a hierarchy above it: seize the highest-value
// objective, or attrit toward the nearest enemy when the map has none.
class GoalSeekPolicy final : public Policy {
 public:
  std::string name() const override { return "goal"; }
  Action act(const GameState& s, UnitId unit) override;
};

// Names accepted: pass, random, greedy, hold, goal. Returns nullptr for
// anything else.
PolicyPtr make_behavior(std::string_view name);
const std::vector<std::string>& behavior_names();

}  // namespace hexwar

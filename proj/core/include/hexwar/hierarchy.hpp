#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hexwar/behaviors.hpp"
#include "hexwar/dqn.hpp"
#include "hexwar/observation.hpp"

namespace hexwar {

inline constexpr int kMinGroup = 3;
inline constexpr int kMaxGroup = 5;
inline constexpr int kJoinRadius = 6;

// What a commander hands a manager: where to go and in what posture.
struct Assignment {
  HexCoord target;
  Posture posture = Posture::seize;
  int objective = -1;  // index into Board::objectives, -1 when none

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

nlohmann::json to_json(const Assignment& a);

struct ActiveSubgoal {
  Subgoal goal;
  int issued_turn = 0;
  UnitId target_unit = -1;  // enemy tracked by an attrit subgoal
};

struct ManagerAgent {
  int id = 0;
  std::vector<UnitId> units;  // ascending
  bool remainder = false;     // fewer than kMinGroup units and no feasible merge
  std::optional<Assignment> assignment;
  std::map<UnitId, ActiveSubgoal> subgoals;
};

// Greedy spatial clustering of `faction`'s units into manager groups.
std::vector<ManagerAgent> partition_units(const GameState& s, Faction faction);

// Mean axial position of the listed living units.
std::pair<double, double> centroid(const GameState& s, const std::vector<UnitId>& units);

struct CommanderAgent {
  Faction faction = Faction::blue;
  int width = 0;
  int height = 0;
  std::vector<Objective> objectives;
  std::vector<std::pair<int, HexCoord>> managers;  // (manager id, group center hex)
};

using CommanderDecision = std::map<int, Assignment>;
using CommanderPolicy =
    std::function<CommanderDecision(const CommanderAgent&, const GlobalAbstraction&)>;

struct RankedObjective {
  int index = 0;
  double score = 0.0;
};

// Objectives by value - 0.5 * (enemy strength of the enemy-held super-cell
// nearest the objective), best first, ties to the lowest index.
std::vector<RankedObjective> rank_objectives(const CommanderAgent& c, const GlobalAbstraction& g);

// Default scripted rule. Without objectives every manager attrits toward the
// enemy's strength-weighted super-cell centroid.
CommanderDecision commander_decide(const CommanderAgent& c, const GlobalAbstraction& g);

struct HierarchyConfig {
  int horizon = 4;      // subgoal persistence in turns
  int grid = 4;         // commander abstraction
  int attrit_radius = 6;
};

// Refreshes per-unit subgoals of `mgr` and returns them. Subgoals persist
// for `horizon` turns or until satisfied; only then are they recomputed.
std::map<UnitId, Subgoal> manager_decide(ManagerAgent& mgr, const GameState& s,
                                         const HierarchyConfig& cfg = {});

// Fresh subgoal for one unit from the manager's assignment, ignoring persistence.
ActiveSubgoal derive_subgoal(const ManagerAgent& mgr, const GameState& s, UnitId unit,
                             const HierarchyConfig& cfg);

// Unit-level executor: the only place primitive actions are produced.
using UnitPolicy = std::function<Action(const GameState&, UnitId, const Subgoal&)>;

// Learned manager: Q-values over option templates from a group-local view.
struct ManagerModel {
  Mlp net;
  int grid = 4;
  int horizon = 4;
  int num_objectives = 0;
};

// Option template i targets objective i / 3 with posture i % 3.
Assignment option_assignment(const Board& b, int option);
int num_options(const Board& b);
// Group-local input: abstraction of the group's padded bounding box plus
// group strength and size fractions.
std::vector<double> manager_features(const GameState& s, const ManagerAgent& mgr, int grid);
int manager_choose(const ManagerModel& m, const GameState& s, const ManagerAgent& mgr);

class HierarchicalPolicy final : public Policy {
 public:
  explicit HierarchicalPolicy(HierarchyConfig cfg = {}, UnitPolicy unit_policy = goal_seek_policy,
                              CommanderPolicy commander = commander_decide);

  std::string name() const override { return "hierarchy"; }
  void reset(std::uint64_t seed) override;
  Action act(const GameState& s, UnitId unit) override;
  nlohmann::json last_trace() const override { return trace_; }

  // Learned managers choose option templates at persistence boundaries.
  void set_manager_model(ManagerModel m) { manager_model_ = std::move(m); }

  const std::vector<ManagerAgent>& managers() const { return managers_; }
  int warnings() const { return warnings_; }

 private:
  void sync_groups(const GameState& s, Faction faction);
  void refresh_commander(const GameState& s, Faction faction);
  ManagerAgent& group_of(const GameState& s, UnitId unit);

  HierarchyConfig cfg_;
  UnitPolicy unit_policy_;
  CommanderPolicy commander_;
  std::optional<ManagerModel> manager_model_;
  std::vector<ManagerAgent> managers_;
  std::map<int, int> option_turn_;  // manager id -> turn its learned option started
  bool initialized_ = false;
  int commander_turn_ = -1;
  int warnings_ = 0;
  nlohmann::json trace_;
};

struct ManagerTrainConfig {
  TrainConfig q;           // gamma, lr, optimizer, batch, replay, epsilon schedule, seed
  int horizon = 4;         // option length in turns
  int grid = 4;
  bool record_options = false;
};

struct OptionRecord {
  int episode = 0;
  int manager = 0;
  int option = 0;
  int start_turn = 0;
  int turns = 0;
  std::vector<int> step_rewards;  // blue-positive, every step during the option
  double reward = 0.0;            // learner-signed, discounted per turn
};

struct ManagerTrainResult {
  ManagerModel model;
  std::vector<double> curve;  // mean final score per 100-episode window
  std::vector<OptionRecord> options;
};

// Semi-Markov Q-learning over option templates for blue's managers, with
// the unit level frozen and red driven by `adversary`.
ManagerTrainResult train_manager_options(const Scenario& sc, const UnitPolicy& unit_policy,
                                         Policy& adversary, const ManagerTrainConfig& cfg);

nlohmann::json model_to_json(const ManagerModel& m);
ManagerModel manager_model_from_json(const nlohmann::json& j);

}  // namespace hexwar

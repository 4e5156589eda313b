#include "hexwar/behaviors.hpp"

#include <limits>

namespace hexwar {

namespace {

const Unit& alive(const GameState& s, UnitId unit) {
  const Unit* u = s.find(unit);
  if (u == nullptr) throw std::invalid_argument("unit " + std::to_string(unit) + " is not alive");
  return *u;
}

// Nearest enemy to `from` satisfying `pred`; ties to the lowest id.
template <typename Pred>
const Unit* nearest_enemy(const GameState& s, const Unit& me, Pred pred) {
  const Unit* best = nullptr;
  int best_d = std::numeric_limits<int>::max();
  for (const auto& u : s.units) {
    if (u.faction == me.faction || !pred(u)) continue;
    const int d = distance(me.pos, u.pos);
    if (d < best_d) {
      best = &u;
      best_d = d;
    }
  }
  return best;
}

int nearest_objective(const Board& b, HexCoord from) {
  int best = -1;
  int best_d = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < b.objectives.size(); ++i) {
    const int d = distance(from, b.objectives[i].pos);
    if (d < best_d) {
      best = static_cast<int>(i);
      best_d = d;
    }
  }
  return best;
}

int highest_value_objective(const Board& b) {
  int best = -1;
  for (std::size_t i = 0; i < b.objectives.size(); ++i) {
    if (best < 0 || b.objectives[i].value > b.objectives[static_cast<std::size_t>(best)].value) {
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace

std::string_view to_string(Posture p) {
  switch (p) {
    case Posture::seize: return "seize";
    case Posture::defend: return "defend";
    case Posture::attrit: return "attrit";
  }
  return "?";
}

std::optional<Posture> posture_from_string(std::string_view s) {
  if (s == "seize") return Posture::seize;
  if (s == "defend") return Posture::defend;
  if (s == "attrit") return Posture::attrit;
  return std::nullopt;
}

nlohmann::json to_json(const Subgoal& g) {
  return {{"target", {g.target.q, g.target.r}},
          {"posture", to_string(g.posture)},
          {"horizon", g.horizon}};
}

std::optional<Action> attack_weakest_adjacent(const GameState& s, UnitId unit) {
  const Unit& me = alive(s, unit);
  std::optional<Action> best;
  int best_strength = std::numeric_limits<int>::max();
  for (int d = 0; d < kNumDirections; ++d) {
    const Unit* other = s.unit_at(neighbor(me.pos, d));
    if (other != nullptr && other->faction != me.faction && other->strength < best_strength) {
      best = Action::attack(d);
      best_strength = other->strength;
    }
  }
  return best;
}

Action move_toward(const GameState& s, UnitId unit, HexCoord target) {
  const Unit& me = alive(s, unit);
  int best_d = distance(me.pos, target);
  Action best = Action::pass();
  for (int d = 0; d < kNumDirections; ++d) {
    const HexCoord dest = neighbor(me.pos, d);
    if (!s.board->in_bounds(dest) || !s.board->passable(dest) || s.unit_at(dest) != nullptr) {
      continue;
    }
    const int nd = distance(dest, target);
    if (nd < best_d) {
      best_d = nd;
      best = Action::move(d);
    }
  }
  return best;
}

Action pass_policy(const GameState& s, UnitId unit) {
  alive(s, unit);
  return Action::pass();
}

Action random_policy(const GameState& s, UnitId unit, Rng& rng) {
  const auto legal = legal_actions(s, unit);
  return legal[uniform_index(rng, legal.size())];
}

Action greedy_attack_policy(const GameState& s, UnitId unit) {
  if (auto attack = attack_weakest_adjacent(s, unit)) return *attack;
  const Unit& me = alive(s, unit);
  if (const Unit* enemy = nearest_enemy(s, me, [](const Unit&) { return true; })) {
    return move_toward(s, unit, enemy->pos);
  }
  const int obj = highest_value_objective(*s.board);
  if (obj < 0) return Action::pass();
  return move_toward(s, unit, s.board->objectives[static_cast<std::size_t>(obj)].pos);
}

Action objective_hold_policy(const GameState& s, UnitId unit) {
  const Unit& me = alive(s, unit);
  const int obj = nearest_objective(*s.board, me.pos);
  if (obj < 0) return Action::pass();
  const HexCoord target = s.board->objectives[static_cast<std::size_t>(obj)].pos;
  if (me.pos != target) return move_toward(s, unit, target);
  return attack_weakest_adjacent(s, unit).value_or(Action::pass());
}

Action goal_seek_policy(const GameState& s, UnitId unit, const Subgoal& g) {
  const Unit& me = alive(s, unit);
  switch (g.posture) {
    case Posture::seize:
      if (auto attack = attack_weakest_adjacent(s, unit)) return *attack;
      return move_toward(s, unit, g.target);
    case Posture::defend:
      if (me.pos != g.target) return move_toward(s, unit, g.target);
      return attack_weakest_adjacent(s, unit).value_or(Action::pass());
    case Posture::attrit: {
      const auto near_target = [&](const Unit& u) { return distance(u.pos, g.target) <= 4; };
      if (const Unit* enemy = nearest_enemy(s, me, near_target)) {
        if (auto attack = attack_weakest_adjacent(s, unit)) return *attack;
        return move_toward(s, unit, enemy->pos);
      }
      return move_toward(s, unit, g.target);
    }
  }
  return Action::pass();
}

Action GoalSeekPolicy::act(const GameState& s, UnitId unit) {
  const int obj = highest_value_objective(*s.board);
  if (obj >= 0) {
    return goal_seek_policy(
        s, unit, Subgoal{s.board->objectives[static_cast<std::size_t>(obj)].pos, Posture::seize});
  }
  const Unit& me = alive(s, unit);
  if (const Unit* enemy = nearest_enemy(s, me, [](const Unit&) { return true; })) {
    return goal_seek_policy(s, unit, Subgoal{enemy->pos, Posture::attrit});
  }
  return Action::pass();
}

PolicyPtr make_behavior(std::string_view name) {
  if (name == "pass") return std::make_unique<PassPolicy>();
  if (name == "random") return std::make_unique<RandomPolicy>();
  if (name == "greedy") return std::make_unique<GreedyAttackPolicy>();
  if (name == "hold") return std::make_unique<ObjectiveHoldPolicy>();
  if (name == "goal") return std::make_unique<GoalSeekPolicy>();
  return nullptr;
}

const std::vector<std::string>& behavior_names() {
  static const std::vector<std::string> names{"pass", "random", "greedy", "hold", "goal"};
  return names;
}

}  // namespace hexwar

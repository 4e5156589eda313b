#include "hexwar/engine.hpp"

#include <algorithm>

namespace hexwar {

namespace {

constexpr std::int64_t kBp = 10000;

std::int64_t ceil_div(std::int64_t num, std::int64_t den) {
  return num <= 0 ? 0 : (num + den - 1) / den;
}

StepEvent make_event(EventKind kind, UnitId unit = -1, UnitId target = -1) {
  StepEvent e;
  e.kind = kind;
  e.unit = unit;
  e.target = target;
  return e;
}

void check_unit_on_move(const GameState& s, UnitId unit) {
  const Unit* u = s.find(unit);
  if (u == nullptr) {
    throw std::invalid_argument("unknown or destroyed unit " + std::to_string(unit));
  }
}

}  // namespace

char terrain_char(TerrainKind t) {
  switch (t) {
    case TerrainKind::clear: return 'c';
    case TerrainKind::rough: return 'r';
    case TerrainKind::urban: return 'u';
    case TerrainKind::water: return 'w';
  }
  return '?';
}

std::optional<TerrainKind> terrain_from_char(char c) {
  switch (c) {
    case 'c': return TerrainKind::clear;
    case 'r': return TerrainKind::rough;
    case 'u': return TerrainKind::urban;
    case 'w': return TerrainKind::water;
    default: return std::nullopt;
  }
}

std::string_view to_string(Faction f) { return f == Faction::blue ? "blue" : "red"; }

std::optional<Faction> faction_from_string(std::string_view s) {
  if (s == "blue") return Faction::blue;
  if (s == "red") return Faction::red;
  return std::nullopt;
}

std::string_view to_string(UnitKind k) {
  return k == UnitKind::infantry ? "infantry" : "armor";
}

std::optional<UnitKind> unit_kind_from_string(std::string_view s) {
  if (s == "infantry") return UnitKind::infantry;
  if (s == "armor") return UnitKind::armor;
  return std::nullopt;
}

int Board::max_objective_value() const {
  int best = 0;
  for (const auto& o : objectives) best = std::max(best, o.value);
  return best;
}

int Board::objective_at(HexCoord c) const {
  for (std::size_t i = 0; i < objectives.size(); ++i) {
    if (objectives[i].pos == c) return static_cast<int>(i);
  }
  return -1;
}

Action Action::from_index(int index) {
  if (index == 0) return pass();
  if (index >= 1 && index <= 6) return move(index - 1);
  if (index >= 7 && index <= 12) return attack(index - 7);
  throw std::invalid_argument("action index out of range: " + std::to_string(index));
}

std::string to_string(Action a) {
  switch (a.kind) {
    case ActionKind::pass: return "pass";
    case ActionKind::move: return "move(" + std::to_string(a.dir) + ")";
    case ActionKind::attack: return "attack(" + std::to_string(a.dir) + ")";
  }
  return "?";
}

nlohmann::json action_to_json(Action a) {
  switch (a.kind) {
    case ActionKind::pass: return {{"kind", "pass"}};
    case ActionKind::move: return {{"kind", "move"}, {"dir", a.dir}};
    case ActionKind::attack: return {{"kind", "attack"}, {"dir", a.dir}};
  }
  return nullptr;
}

Action action_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw std::invalid_argument("action must be an object with a string 'kind'");
  }
  const auto kind = j["kind"].get<std::string>();
  if (kind == "pass") return Action::pass();
  if (kind != "move" && kind != "attack") {
    throw std::invalid_argument("unknown action kind '" + kind + "'");
  }
  if (!j.contains("dir") || !j["dir"].is_number_integer()) {
    throw std::invalid_argument(kind + " requires an integer 'dir'");
  }
  const int dir = j["dir"].get<int>();
  if (dir < 0 || dir >= kNumDirections) {
    throw std::invalid_argument("direction out of range: " + std::to_string(dir));
  }
  return kind == "move" ? Action::move(dir) : Action::attack(dir);
}

const Unit* GameState::find(UnitId id) const {
  auto it = std::lower_bound(units.begin(), units.end(), id,
                             [](const Unit& u, UnitId v) { return u.id < v; });
  return (it != units.end() && it->id == id) ? &*it : nullptr;
}

Unit* GameState::find(UnitId id) {
  return const_cast<Unit*>(std::as_const(*this).find(id));
}

const Unit* GameState::unit_at(HexCoord c) const {
  for (const auto& u : units) {
    if (u.pos == c) return &u;
  }
  return nullptr;
}

int GameState::total_strength(Faction f) const {
  int total = 0;
  for (const auto& u : units) {
    if (u.faction == f) total += u.strength;
  }
  return total;
}

int GameState::unit_count(Faction f) const {
  return static_cast<int>(std::count_if(
      units.begin(), units.end(), [f](const Unit& u) { return u.faction == f; }));
}

bool GameState::is_terminal() const {
  return turn >= board->max_turns || unit_count(Faction::blue) == 0 ||
         unit_count(Faction::red) == 0;
}

nlohmann::json event_to_json(const StepEvent& e) {
  nlohmann::json j;
  switch (e.kind) {
    case EventKind::pass:
      j = {{"kind", "pass"}, {"unit", e.unit}};
      break;
    case EventKind::move:
      j = {{"kind", "move"}, {"unit", e.unit},
           {"from", {e.from.q, e.from.r}}, {"to", {e.to.q, e.to.r}}};
      break;
    case EventKind::attack:
      j = {{"kind", "attack"}, {"unit", e.unit}, {"target", e.target},
           {"damage", e.damage}, {"counter", e.counter}};
      break;
    case EventKind::destroyed:
      j = {{"kind", "destroyed"}, {"unit", e.unit}};
      break;
    case EventKind::turn_end:
      j = {{"kind", "turn_end"}, {"points", e.points}};
      break;
  }
  return j;
}

std::optional<UnitId> unit_on_move(const GameState& s) {
  if (s.is_terminal()) return std::nullopt;
  for (const auto& u : s.units) {
    if (u.faction == s.phase && !u.acted) return u.id;
  }
  return std::nullopt;
}

std::vector<Action> legal_actions(const GameState& s, UnitId unit) {
  check_unit_on_move(s, unit);
  const Unit& u = *s.find(unit);
  std::vector<Action> out;
  out.push_back(Action::pass());
  for (int d = 0; d < kNumDirections; ++d) {
    const HexCoord dest = neighbor(u.pos, d);
    if (!s.board->in_bounds(dest) || !s.board->passable(dest)) continue;
    if (s.unit_at(dest) == nullptr) out.push_back(Action::move(d));
  }
  for (int d = 0; d < kNumDirections; ++d) {
    const Unit* other = s.unit_at(neighbor(u.pos, d));
    if (other != nullptr && other->faction != u.faction) out.push_back(Action::attack(d));
  }
  return out;
}

bool is_legal(const GameState& s, UnitId unit, Action a) {
  const auto legal = legal_actions(s, unit);
  return std::find(legal.begin(), legal.end(), a) != legal.end();
}

int attack_damage(int attacker_strength, TerrainKind defender_terrain, int eta_bp,
                  const CombatConfig& cfg) {
  const std::int64_t num = static_cast<std::int64_t>(attacker_strength) * cfg.attack_bp *
                           terrain_info(defender_terrain).defense_bp * eta_bp;
  return static_cast<int>(ceil_div(num, kBp * kBp * kBp));
}

int counter_damage(int defender_strength_after, int eta_bp, const CombatConfig& cfg) {
  const std::int64_t num =
      static_cast<std::int64_t>(defender_strength_after) * cfg.counter_bp * eta_bp;
  return static_cast<int>(ceil_div(num, kBp * kBp));
}

StepResult step(GameState& s, UnitId unit, Action a) {
  const auto on_move = unit_on_move(s);
  if (!on_move || *on_move != unit) {
    throw IllegalAction("not on move: unit " + std::to_string(unit));
  }
  if (!is_legal(s, unit, a)) {
    throw IllegalAction("illegal action " + to_string(a) + " for unit " +
                        std::to_string(unit));
  }

  StepResult result;
  Unit* actor = s.find(unit);
  const Faction side = actor->faction;
  const int blue_before = s.total_strength(Faction::blue);
  const int red_before = s.total_strength(Faction::red);

  switch (a.kind) {
    case ActionKind::pass:
      result.events.push_back(make_event(EventKind::pass, unit));
      break;
    case ActionKind::move: {
      StepEvent ev = make_event(EventKind::move, unit);
      ev.from = actor->pos;
      actor->pos = neighbor(actor->pos, a.dir);
      ev.to = actor->pos;
      result.events.push_back(ev);
      break;
    }
    case ActionKind::attack: {
      const HexCoord target_pos = neighbor(actor->pos, a.dir);
      Unit* defender = const_cast<Unit*>(s.unit_at(target_pos));
      const CombatConfig& cfg = s.board->combat;
      int eta = 10000;
      if (!cfg.deterministic) {
        eta = cfg.eta_bp[uniform_index(s.rng, cfg.eta_bp.size())];
      }
      const int dmg = std::min(
          defender->strength,
          attack_damage(actor->strength, s.board->terrain_at(target_pos), eta, cfg));
      defender->strength -= dmg;
      const int ctr = std::min(actor->strength, counter_damage(defender->strength, eta, cfg));
      actor->strength -= ctr;

      StepEvent ev = make_event(EventKind::attack, unit, defender->id);
      ev.damage = dmg;
      ev.counter = ctr;
      result.events.push_back(ev);
      break;
    }
  }
  actor->acted = true;

  // Remove destroyed units (ids stay ascending).
  for (const auto& u : s.units) {
    if (u.strength <= 0) result.events.push_back(make_event(EventKind::destroyed, u.id));
  }
  std::erase_if(s.units, [](const Unit& u) { return u.strength <= 0; });

  const int blue_lost = blue_before - s.total_strength(Faction::blue);
  const int red_lost = red_before - s.total_strength(Faction::red);
  int delta = red_lost - blue_lost;

  // Phase and turn advance once no un-acted unit of the phase faction remains.
  const bool phase_done = std::none_of(s.units.begin(), s.units.end(), [&](const Unit& u) {
    return u.faction == side && !u.acted;
  });
  if (phase_done && !s.is_terminal()) {
    if (s.phase == Faction::blue) {
      s.phase = Faction::red;
    } else {
      int points = 0;
      for (const auto& obj : s.board->objectives) {
        if (const Unit* holder = s.unit_at(obj.pos)) {
          points += faction_sign(holder->faction) * obj.value;
        }
      }
      StepEvent ev = make_event(EventKind::turn_end);
      ev.points = points;
      result.events.push_back(ev);
      delta += points;
      s.turn += 1;
      s.phase = Faction::blue;
      for (auto& u : s.units) u.acted = false;
    }
  }

  s.score += delta;
  result.reward = delta;
  return result;
}

nlohmann::json snapshot(const GameState& s) {
  nlohmann::json units = nlohmann::json::array();
  for (const auto& u : s.units) {
    units.push_back({{"id", u.id},
                     {"faction", to_string(u.faction)},
                     {"kind", to_string(u.kind)},
                     {"strength", u.strength},
                     {"q", u.pos.q},
                     {"r", u.pos.r},
                     {"acted", u.acted}});
  }
  return {{"turn", s.turn},
          {"phase", to_string(s.phase)},
          {"score", s.score},
          {"units", std::move(units)}};
}

}  // namespace hexwar

#include "hexwar/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hexwar {

namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ScenarioError(where + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

int require_int(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number_integer()) {
    throw ScenarioError(where + ": field '" + key + "' must be an integer");
  }
  return v.get<int>();
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) {
    throw ScenarioError(where + ": field '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

int to_bp(const json& v, const char* key) {
  if (!v.is_number()) throw ScenarioError(std::string("combat.") + key + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x) || x <= 0.0 || x > 10.0) {
    throw ScenarioError(std::string("combat.") + key + " out of range");
  }
  return static_cast<int>(std::llround(x * 10000.0));
}

CombatConfig parse_combat(const json& j) {
  CombatConfig cfg;
  if (!j.is_object()) throw ScenarioError("combat must be an object");
  if (j.contains("deterministic")) {
    if (!j["deterministic"].is_boolean()) throw ScenarioError("combat.deterministic must be a bool");
    cfg.deterministic = j["deterministic"].get<bool>();
  }
  if (j.contains("attack")) cfg.attack_bp = to_bp(j["attack"], "attack");
  if (j.contains("counter")) cfg.counter_bp = to_bp(j["counter"], "counter");
  if (j.contains("eta")) {
    const json& eta = j["eta"];
    if (!eta.is_array() || eta.size() != 3) throw ScenarioError("combat.eta must hold 3 numbers");
    for (std::size_t i = 0; i < 3; ++i) cfg.eta_bp[i] = to_bp(eta[i], "eta");
  }
  return cfg;
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  if (!doc.is_object()) throw ScenarioError("scenario must be a JSON object");
  auto board = std::make_shared<Board>();
  board->name = require_string(doc, "name", "scenario");
  board->width = require_int(doc, "width", "scenario");
  board->height = require_int(doc, "height", "scenario");
  board->max_turns = require_int(doc, "max_turns", "scenario");
  if (board->width < 1 || board->height < 1) throw ScenarioError("width and height must be >= 1");
  if (board->max_turns < 1) throw ScenarioError("max_turns must be >= 1");

  board->terrain.assign(static_cast<std::size_t>(board->width * board->height),
                        TerrainKind::clear);
  if (doc.contains("terrain")) {
    const json& rows = doc["terrain"];
    if (!rows.is_array() || static_cast<int>(rows.size()) != board->height) {
      throw ScenarioError("terrain must be an array of " + std::to_string(board->height) +
                          " row strings");
    }
    for (int r = 0; r < board->height; ++r) {
      if (!rows[static_cast<std::size_t>(r)].is_string()) {
        throw ScenarioError("terrain row " + std::to_string(r) + " must be a string");
      }
      const auto row = rows[static_cast<std::size_t>(r)].get<std::string>();
      if (static_cast<int>(row.size()) != board->width) {
        throw ScenarioError("terrain row " + std::to_string(r) + " must have " +
                            std::to_string(board->width) + " characters");
      }
      for (int q = 0; q < board->width; ++q) {
        const auto t = terrain_from_char(row[static_cast<std::size_t>(q)]);
        if (!t) {
          throw ScenarioError("terrain row " + std::to_string(r) + ": unknown terrain '" +
                              row[static_cast<std::size_t>(q)] + "'");
        }
        board->terrain[static_cast<std::size_t>(r * board->width + q)] = *t;
      }
    }
  }

  if (doc.contains("objectives")) {
    const json& objs = doc["objectives"];
    if (!objs.is_array()) throw ScenarioError("objectives must be an array");
    std::set<HexCoord> seen;
    for (std::size_t i = 0; i < objs.size(); ++i) {
      const std::string where = "objectives[" + std::to_string(i) + "]";
      Objective o;
      o.pos = {require_int(objs[i], "q", where), require_int(objs[i], "r", where)};
      o.value = require_int(objs[i], "value", where);
      if (!board->in_bounds(o.pos)) throw ScenarioError(where + ": out of bounds");
      if (o.value < 0) throw ScenarioError(where + ": value must be >= 0");
      if (!seen.insert(o.pos).second) throw ScenarioError(where + ": duplicate objective hex");
      board->objectives.push_back(o);
    }
  }

  if (doc.contains("combat")) board->combat = parse_combat(doc["combat"]);

  Scenario sc;
  const json& units = require(doc, "units", "scenario");
  if (!units.is_array()) throw ScenarioError("units must be an array");
  std::set<UnitId> ids;
  std::set<HexCoord> occupied;
  for (std::size_t i = 0; i < units.size(); ++i) {
    const std::string where = "units[" + std::to_string(i) + "]";
    Unit u;
    u.id = require_int(units[i], "id", where);
    const auto faction = faction_from_string(require_string(units[i], "faction", where));
    if (!faction) throw ScenarioError(where + ": faction must be 'blue' or 'red'");
    u.faction = *faction;
    if (units[i].contains("kind")) {
      const auto kind = unit_kind_from_string(require_string(units[i], "kind", where));
      if (!kind) throw ScenarioError(where + ": kind must be 'infantry' or 'armor'");
      u.kind = *kind;
    }
    u.strength = units[i].contains("strength") ? require_int(units[i], "strength", where)
                                                : kMaxStrength;
    u.pos = {require_int(units[i], "q", where), require_int(units[i], "r", where)};
    if (u.id < 0) throw ScenarioError(where + ": id must be >= 0");
    if (!ids.insert(u.id).second) throw ScenarioError(where + ": duplicate unit id");
    if (u.strength < 1 || u.strength > kMaxStrength) {
      throw ScenarioError(where + ": strength must be in [1, 100]");
    }
    if (!board->in_bounds(u.pos)) throw ScenarioError(where + ": out of bounds");
    if (!board->passable(u.pos)) throw ScenarioError(where + ": impassable placement");
    if (!occupied.insert(u.pos).second) throw ScenarioError(where + ": hex occupied");
    sc.units.push_back(u);
  }
  std::sort(sc.units.begin(), sc.units.end(),
            [](const Unit& a, const Unit& b) { return a.id < b.id; });
  sc.board = std::move(board);
  return sc;
}

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(std::string_view(buf.str()));
}

nlohmann::json scenario_to_json(const Scenario& sc) {
  const Board& b = *sc.board;
  json terrain = json::array();
  for (int r = 0; r < b.height; ++r) {
    std::string row;
    for (int q = 0; q < b.width; ++q) row.push_back(terrain_char(b.terrain_at({q, r})));
    terrain.push_back(row);
  }
  json objectives = json::array();
  for (const auto& o : b.objectives) {
    objectives.push_back({{"q", o.pos.q}, {"r", o.pos.r}, {"value", o.value}});
  }
  json units = json::array();
  for (const auto& u : sc.units) {
    units.push_back({{"id", u.id},
                     {"faction", to_string(u.faction)},
                     {"kind", to_string(u.kind)},
                     {"strength", u.strength},
                     {"q", u.pos.q},
                     {"r", u.pos.r}});
  }
  json eta = json::array();
  for (int e : b.combat.eta_bp) eta.push_back(e / 10000.0);
  return {{"name", b.name},
          {"width", b.width},
          {"height", b.height},
          {"max_turns", b.max_turns},
          {"terrain", terrain},
          {"objectives", objectives},
          {"units", units},
          {"combat",
           {{"deterministic", b.combat.deterministic},
            {"attack", b.combat.attack_bp / 10000.0},
            {"counter", b.combat.counter_bp / 10000.0},
            {"eta", eta}}}};
}

GameState initial_state(const Scenario& sc, std::uint64_t seed) {
  GameState s;
  s.board = sc.board;
  s.units = sc.units;
  s.rng.seed(seed);
  return s;
}

GameState load_scenario(std::string_view text, std::uint64_t seed) {
  return initial_state(parse_scenario(text), seed);
}

}  // namespace hexwar

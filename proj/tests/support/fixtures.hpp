#pragma once

#include <algorithm>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "hexwar/engine.hpp"
#include "hexwar/rng.hpp"
#include "hexwar/scenario.hpp"

namespace hexwar::testing {

inline std::filesystem::path scenario_path(const std::string& name) {
  return std::filesystem::path(HEXWAR_SCENARIO_DIR) / name;
}

inline Scenario scenario_file(const std::string& name) {
  return load_scenario_file(scenario_path(name));
}

// All-clear board unless rows are given.
inline std::shared_ptr<Board> make_board(int w, int h, int max_turns = 10,
                                         std::vector<std::string> rows = {},
                                         std::vector<Objective> objectives = {}) {
  auto b = std::make_shared<Board>();
  b->name = "fixture";
  b->width = w;
  b->height = h;
  b->max_turns = max_turns;
  b->terrain.assign(static_cast<std::size_t>(w * h), TerrainKind::clear);
  for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
    for (int q = 0; q < w; ++q) {
      b->terrain[static_cast<std::size_t>(r * w + q)] = *terrain_from_char(rows[r][q]);
    }
  }
  b->objectives = std::move(objectives);
  return b;
}

inline Unit unit(UnitId id, Faction f, HexCoord pos, int strength = 100) {
  Unit u;
  u.id = id;
  u.faction = f;
  u.pos = pos;
  u.strength = strength;
  return u;
}

inline GameState make_state(std::shared_ptr<const Board> board, std::vector<Unit> units,
                            std::uint64_t seed = 0) {
  std::sort(units.begin(), units.end(), [](const Unit& a, const Unit& b) { return a.id < b.id; });
  Scenario sc{std::move(board), std::move(units)};
  return initial_state(sc, seed);
}

inline Scenario make_scenario(std::shared_ptr<const Board> board, std::vector<Unit> units) {
  std::sort(units.begin(), units.end(), [](const Unit& a, const Unit& b) { return a.id < b.id; });
  return Scenario{std::move(board), std::move(units)};
}

// Random board with mixed terrain, objectives and forces. Every unit sits
// on a passable, distinct hex.
inline Scenario random_scenario(Rng& rng, int w, int h, int blue, int red, int max_turns = 6) {
  auto b = make_board(w, h, max_turns);
  b->combat.deterministic = uniform_index(rng, 2) == 0;
  for (auto& t : b->terrain) {
    const auto x = uniform_index(rng, 10);
    t = x < 6 ? TerrainKind::clear : x < 8 ? TerrainKind::rough : x < 9 ? TerrainKind::urban
                                                                        : TerrainKind::water;
  }
  std::vector<HexCoord> free;
  for (int r = 0; r < h; ++r)
    for (int q = 0; q < w; ++q)
      if (b->passable({q, r})) free.push_back({q, r});
  auto take = [&] {
    const auto i = uniform_index(rng, free.size());
    const HexCoord c = free[i];
    free.erase(free.begin() + static_cast<std::ptrdiff_t>(i));
    return c;
  };
  const int n_obj = static_cast<int>(uniform_index(rng, 3));
  for (int i = 0; i < n_obj && !free.empty(); ++i) {
    const HexCoord c = free[uniform_index(rng, free.size())];
    if (b->objective_at(c) >= 0) continue;
    b->objectives.push_back({c, 1 + static_cast<int>(uniform_index(rng, 9))});
  }
  std::vector<Unit> units;
  int id = 0;
  for (int i = 0; i < blue + red && !free.empty(); ++i) {
    const Faction f = i < blue ? Faction::blue : Faction::red;
    units.push_back(unit(id++, f, take(), 10 + static_cast<int>(uniform_index(rng, 91))));
  }
  return Scenario{std::move(b), std::move(units)};
}

}  // namespace hexwar::testing

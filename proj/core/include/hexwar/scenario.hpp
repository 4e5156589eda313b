#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hexwar/engine.hpp"

namespace hexwar {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parsed scenario document: static board plus the initial force laydown.
struct Scenario {
  std::shared_ptr<const Board> board;
  std::vector<Unit> units;  // ascending id

  const std::string& name() const { return board->name; }
};

// Validates and parses a scenario document. Throws ScenarioError with a
// descriptive message ("hex occupied", "impassable placement", ...).
Scenario parse_scenario(const nlohmann::json& doc);
Scenario parse_scenario(std::string_view text);
Scenario load_scenario_file(const std::filesystem::path& path);

nlohmann::json scenario_to_json(const Scenario& sc);

// Fresh game: turn 0, blue phase, score 0, RNG seeded with `seed`.
GameState initial_state(const Scenario& sc, std::uint64_t seed);

// Parse-and-initialize convenience.
GameState load_scenario(std::string_view text, std::uint64_t seed = 0);

}  // namespace hexwar

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hexwar/episode.hpp"

namespace hexwar {

inline constexpr int kProtocolVersion = 1;

// Message builders. Every message is one JSON object with a "type" field.
nlohmann::json hello_message(const Scenario& sc);
nlohmann::json state_message(const GameState& s);
nlohmann::json prompt_message(const GameState& s, UnitId unit);
nlohmann::json error_message(std::string_view code, std::string_view msg);
nlohmann::json gameover_message(int final_score);

// FNV-1a over the terrain rows, as 16 hex digits.
std::string terrain_digest(const Board& b);

// One human-vs-AI game. The human always commands blue; red moves are
// applied server-side. Feed each incoming line to handle() and send back
// everything it returns, in order.
class PlaySession {
 public:
  PlaySession(Scenario sc, PolicyPtr red, std::uint64_t seed);

  // hello, then red moves (if any) and the first prompt or gameover.
  std::vector<nlohmann::json> start();
  std::vector<nlohmann::json> handle(std::string_view line);

  // Peer went away mid-game: the log is kept and marked truncated.
  void disconnect();

  bool finished() const { return finished_; }
  std::optional<UnitId> pending_prompt() const { return prompt_; }
  const GameState& state() const { return state_; }
  const EpisodeLog& log() const { return log_; }

 private:
  std::vector<nlohmann::json> advance();
  nlohmann::json apply(UnitId unit, Action a, nlohmann::json trace);
  void reprompt(std::vector<nlohmann::json>& out) const;

  Scenario scenario_;
  PolicyPtr red_;
  GameState state_;
  EpisodeLog log_;
  std::optional<UnitId> prompt_;
  bool started_ = false;
  bool finished_ = false;
};

}  // namespace hexwar

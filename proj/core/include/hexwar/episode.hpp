#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hexwar/engine.hpp"
#include "hexwar/scenario.hpp"

namespace hexwar {

// Anything that can choose an action for the unit on move.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string name() const = 0;
  // Called once before every episode with a seed private to this policy.
  virtual void reset(std::uint64_t /*seed*/) {}
  virtual Action act(const GameState& s, UnitId unit) = 0;
  // Decision trace for the most recent act() call, or null.
  virtual nlohmann::json last_trace() const { return nullptr; }
};

using PolicyPtr = std::unique_ptr<Policy>;

struct StepRecord {
  int turn = 0;
  UnitId unit = -1;
  Faction faction = Faction::blue;
  nlohmann::json state;  // snapshot() before the action
  Action action;
  int reward = 0;
  nlohmann::json trace;  // null unless the acting policy records decisions
};

struct EpisodeLog {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string blue;
  std::string red;
  nlohmann::json meta;  // free-form header payload (run manifest echo)
  std::vector<StepRecord> records;
  int final_score = 0;
  bool truncated = false;
};

class EpisodeAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ReplayMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Seeds handed to the two policies by run_episode.
constexpr std::uint64_t policy_seed(std::uint64_t episode_seed, Faction f) {
  return derive_seed(episode_seed, f == Faction::blue ? 1 : 2);
}

// Plays one game to the end. Throws EpisodeAborted when a policy emits an
// illegal action.
EpisodeLog run_episode(const Scenario& sc, Policy& blue, Policy& red, std::uint64_t seed);

// Re-applies the logged actions from the scenario and seed. `visit` sees the
// pre-action state of every record. Throws ReplayMismatch when a snapshot,
// reward or the final score disagrees with the log.
void replay(const Scenario& sc, const EpisodeLog& log,
            const std::function<void(const GameState&, const StepRecord&)>& visit = {});

// Newline-delimited JSON: header, one line per step, final line.
void write_log(std::ostream& out, const EpisodeLog& log);
std::string to_ndjson(const EpisodeLog& log);
// Reads every episode in the stream. Throws std::runtime_error on malformed input.
std::vector<EpisodeLog> read_logs(std::istream& in);

}  // namespace hexwar

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hexwar/scenario.hpp"

namespace hexwar::tools {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitRuntime = 3 };

// Bad references or parameters; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunManifest {
  std::string command;
  std::filesystem::path scenario;
  std::string blue = "pass";
  std::string red = "pass";
  std::vector<std::string> policies;  // eval round-robin entrants
  std::uint64_t seed = 0;
  std::optional<int> episodes;
  std::filesystem::path out;
  std::filesystem::path config;
  unsigned short port = 8080;
  std::optional<bool> deterministic_combat;
};

nlohmann::json to_json(const RunManifest& m);

// Checks every reference (scenario, policy specs, config) before anything
// runs. Throws ConfigError.
void validate_manifest(const RunManifest& m);

// The manifest's scenario with the combat override applied.
Scenario resolve_scenario(const RunManifest& m);

struct ScoreStats {
  int n = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 when n < 2
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool degenerate = false;  // n < 2: no interval can be formed
};

// Mean, sample deviation and a 95% normal-approximation interval.
ScoreStats score_stats(const std::vector<double>& xs);

struct SimulateSummary {
  ScoreStats stats;
  int wins = 0;  // final_score > 0
  int draws = 0;
  int losses = 0;
  std::vector<int> scores;
};

nlohmann::json to_json(const SimulateSummary& s);

SimulateSummary cmd_simulate(const RunManifest& m, std::ostream& report);

// Writes model + curve files into m.out and returns their paths.
std::vector<std::filesystem::path> cmd_train(const RunManifest& m, std::ostream& report);

struct EvalRow {
  std::string blue;  // for seat-averaged rows: the entrant whose perspective is reported
  std::string red;
  ScoreStats stats;
};

struct EvalTable {
  std::vector<EvalRow> ordered;        // one row per ordered pair
  std::vector<EvalRow> seat_averaged;  // one row per unordered pair, both seatings pooled
};

nlohmann::json to_json(const EvalTable& t);

EvalTable cmd_eval(const RunManifest& m, std::ostream& report);

// Blocks serving until the process is interrupted.
int cmd_serve(const RunManifest& m, std::ostream& report);

// Full command-line front end. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hexwar::tools

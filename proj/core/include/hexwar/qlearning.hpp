#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "hexwar/episode.hpp"

namespace hexwar {

// Canonical key for small games: turn, phase and every unit's full state.
std::string state_key(const GameState& s);

// Action values keyed by state_key. Missing entries read as zero.
class QTable {
 public:
  using Row = std::array<double, kNumActions>;

  double get(const std::string& key, int action) const;
  void set(const std::string& key, int action, double value);
  const Row* find(const std::string& key) const;
  std::size_t size() const { return rows_.size(); }
  const std::unordered_map<std::string, Row>& rows() const { return rows_; }

  // Best legal action; ties (including an empty row) go to the lowest index.
  Action greedy(const std::string& key, const std::vector<Action>& legal) const;
  double max_value(const std::string& key, const std::vector<Action>& legal) const;

 private:
  std::unordered_map<std::string, Row> rows_;
};

struct TabularConfig {
  double gamma = 0.9;
  double alpha = 0.5;
  double eps_start = 1.0;
  double eps_end = 0.1;
  long long eps_decay_steps = 20000;
  long long steps = 50000;  // learner action-selection steps
  std::uint64_t seed = 0;
  std::size_t max_states = 1000000;
};

class StateSpaceOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TabularResult {
  QTable table;
  long long episodes = 0;
};

// One-step epsilon-greedy Q-learning for blue against a fixed red policy.
// Only boards of at most 16 hexes with at most 2 units are accepted; a
// table growing past max_states also raises StateSpaceOverflow.
TabularResult tabular_q_learn(const Scenario& sc, Policy& adversary, const TabularConfig& cfg);

class TabularPolicy final : public Policy {
 public:
  explicit TabularPolicy(QTable table) : table_(std::move(table)) {}
  std::string name() const override { return "tabular"; }
  Action act(const GameState& s, UnitId unit) override {
    return table_.greedy(state_key(s), legal_actions(s, unit));
  }

 private:
  QTable table_;
};

}  // namespace hexwar

#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hexwar/episode.hpp"
#include "hexwar/score_model.hpp"

namespace hexwar {

class ModelFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RepositoryEntry {
  PolicyPtr behavior;
  ScorePredictor predictor;
};

// Picks a repository index from predicted (blue-positive) scores.
using EvaluationRule = std::function<std::size_t(std::span<const double>, Faction)>;

// Highest score for blue, lowest for red; ties to the lowest index.
std::size_t select_best(std::span<const double> scores, Faction controlled);

struct DecisionRecord {
  int turn = 0;
  UnitId unit = -1;
  std::vector<double> scores;
  std::size_t selected = 0;
  std::string model;
};

// At every action-selection step: predict the final score under each
// repository behavior, select one with the evaluation rule, and delegate.
class MultiModel final : public Policy {
 public:
  // Throws std::invalid_argument on an empty repository.
  MultiModel(Faction controlled, std::vector<RepositoryEntry> repository,
             EvaluationRule rule = select_best);

  std::string name() const override;
  void reset(std::uint64_t seed) override;
  Action act(const GameState& s, UnitId unit) override;
  nlohmann::json last_trace() const override;

  // Throws ModelFault naming the predictor on a non-finite output.
  std::vector<double> predict_all(const GameState& s) const;
  std::size_t select(std::span<const double> scores) const;

  Faction faction() const { return faction_; }
  std::size_t size() const { return repo_.size(); }
  const std::vector<DecisionRecord>& decisions() const { return decisions_; }

 private:
  Faction faction_;
  std::vector<RepositoryEntry> repo_;
  EvaluationRule rule_;
  std::vector<DecisionRecord> decisions_;
};

}  // namespace hexwar

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hexwar/episode.hpp"
#include "hexwar/mlp.hpp"
#include "hexwar/observation.hpp"

namespace hexwar {

// Regressor from the global abstraction to the expected final score, valid
// for one (blue behavior, red adversary) pairing.
struct ScorePredictor {
  std::string behavior;
  std::string adversary;
  int grid = 4;
  Mlp net;
  // Network output is in standardized units: score = offset + scale * y.
  double offset = 0.0;
  double scale = 1.0;

  double predict(const GlobalAbstraction& g) const;
  double predict(const GameState& s) const { return predict(encode_global(s, grid)); }
};

class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScoreTrainConfig {
  std::string behavior;
  std::string adversary;
  int grid = 4;
  std::vector<int> hidden{64, 64};
  double lr = 1e-3;
  std::string optimizer = "adam";  // "sgd" or "adam"
  int batch_size = 64;
  int epochs = 20;
  double holdout = 0.2;
  std::uint64_t seed = 0;
  std::size_t min_episodes = 100;
};

nlohmann::json to_json(const ScoreTrainConfig& c);
ScoreTrainConfig score_train_config_from_json(const nlohmann::json& j);

// One (state, final score) pair per logged action-selection step.
struct ScoreSample {
  std::vector<double> features;
  double target = 0.0;
  std::size_t episode = 0;
};

std::vector<ScoreSample> score_samples(const Scenario& sc, std::span<const EpisodeLog> logs,
                                       int grid);

struct ScoreTrainResult {
  ScorePredictor predictor;
  std::vector<double> mse_curve;  // held-out MSE after each epoch
  double heldout_mse = 0.0;
  double baseline_mse = 0.0;      // constant training-mean predictor on the held-out split
  std::size_t train_samples = 0;
  std::size_t heldout_samples = 0;
};

// Supervised regression of final_score from every logged state. Episodes are
// split train/held-out by a seeded shuffle. Throws InsufficientData when
// fewer than cfg.min_episodes logs are supplied.
ScoreTrainResult train_score_model(const Scenario& sc, std::span<const EpisodeLog> logs,
                                   const ScoreTrainConfig& cfg);

}  // namespace hexwar

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hexwar/episode.hpp"
#include "hexwar/mlp.hpp"
#include "hexwar/observation.hpp"
#include "hexwar/replay_buffer.hpp"

namespace hexwar {

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  double gamma = 0.99;
  double lr = 1e-3;
  std::string optimizer = "sgd";  // "sgd" or "adam"
  int batch_size = 64;
  int target_sync = 1000;         // learner steps between target copies
  double eps_start = 1.0;
  double eps_end = 0.05;
  int eps_decay_steps = 50000;
  int episodes = 1000;
  std::uint64_t seed = 0;
  std::size_t replay_capacity = 50000;
  int warmup = 1000;              // transitions stored before updates start
  int train_every = 1;            // learner steps per gradient update
  std::vector<int> hidden{128, 128};
  EncoderParams encoder;

  // Linear schedule from eps_start to eps_end over eps_decay_steps.
  double epsilon(long long step) const;
  // Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

nlohmann::json to_json(const TrainConfig& c);
// Missing keys keep their defaults.
TrainConfig train_config_from_json(const nlohmann::json& j);

// y = r for terminal transitions, else r + gamma * max over next_legal of
// target(next_obs).
std::vector<double> bellman_targets(const Mlp& target, std::span<const Transition* const> batch,
                                    double gamma);

// Gradient of mean((Q(obs)[action] - y)^2) over the batch. Only the taken
// action's output contributes per sample. Returns the loss through `loss`.
Mlp::Gradients q_loss_gradient(const Mlp& online, std::span<const Transition* const> batch,
                               std::span<const double> targets, double* loss);

// One plain gradient step of the Bellman regression. Returns the loss.
double q_update(Mlp& online, const Mlp& target, std::span<const Transition* const> batch,
                double gamma, double lr);

// Learned Q network plus the encoder it was trained with.
struct DqnModel {
  Mlp net;
  EncoderParams encoder;
};

// Greedy over legal actions; ties to the lowest action index.
int greedy_action(std::span<const double> q, std::uint32_t legal);

class DqnPolicy final : public Policy {
 public:
  explicit DqnPolicy(DqnModel model, std::string name = "dqn");
  std::string name() const override { return name_; }
  Action act(const GameState& s, UnitId unit) override;
  const DqnModel& model() const { return model_; }

 private:
  DqnModel model_;
  LocalEncoder encoder_;
  std::string name_;
};

struct DqnResult {
  DqnModel model;
  std::vector<double> curve;  // mean final score per 100-episode window
};

// Deep Q-learning for the blue side against a fixed red adversary. Throws
// TrainingDiverged on a non-finite loss.
DqnResult train_dqn(const Scenario& sc, Policy& adversary, const TrainConfig& cfg);

}  // namespace hexwar

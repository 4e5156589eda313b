#include "hexwar/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace hexwar {

std::uint32_t legal_mask(const std::vector<Action>& legal) {
  std::uint32_t m = 0;
  for (Action a : legal) m |= 1u << a.index();
  return m;
}

double TrainConfig::epsilon(long long step) const {
  if (eps_decay_steps <= 0 || step >= eps_decay_steps) return eps_end;
  const double frac = static_cast<double>(step) / static_cast<double>(eps_decay_steps);
  return eps_start + frac * (eps_end - eps_start);
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("train config: " + what); };
  if (!(gamma >= 0.0 && gamma < 1.0)) fail("gamma must be in [0, 1)");
  if (!(lr > 0.0)) fail("lr must be positive");
  if (optimizer != "sgd" && optimizer != "adam") fail("optimizer must be 'sgd' or 'adam'");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (target_sync < 1) fail("target_sync must be >= 1");
  if (eps_start < 0.0 || eps_start > 1.0 || eps_end < 0.0 || eps_end > 1.0) {
    fail("epsilon bounds must be in [0, 1]");
  }
  if (episodes < 0) fail("episodes must be >= 0");
  if (replay_capacity == 0) fail("replay_capacity must be > 0");
  if (warmup < 0 || train_every < 1) fail("warmup >= 0 and train_every >= 1 required");
  for (int h : hidden) {
    if (h < 1) fail("hidden sizes must be positive");
  }
  if (encoder.radius < 1 || encoder.radius >= encoder.horizon) fail("encoder radius/horizon");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"gamma", c.gamma},
          {"lr", c.lr},
          {"optimizer", c.optimizer},
          {"batch_size", c.batch_size},
          {"target_sync", c.target_sync},
          {"eps_start", c.eps_start},
          {"eps_end", c.eps_end},
          {"eps_decay_steps", c.eps_decay_steps},
          {"episodes", c.episodes},
          {"seed", c.seed},
          {"replay_capacity", c.replay_capacity},
          {"warmup", c.warmup},
          {"train_every", c.train_every},
          {"hidden", c.hidden},
          {"encoder", to_json(c.encoder)}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.gamma = j.value("gamma", c.gamma);
  c.lr = j.value("lr", c.lr);
  c.optimizer = j.value("optimizer", c.optimizer);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.target_sync = j.value("target_sync", c.target_sync);
  c.eps_start = j.value("eps_start", c.eps_start);
  c.eps_end = j.value("eps_end", c.eps_end);
  c.eps_decay_steps = j.value("eps_decay_steps", c.eps_decay_steps);
  c.episodes = j.value("episodes", c.episodes);
  c.seed = j.value("seed", c.seed);
  c.replay_capacity = j.value("replay_capacity", c.replay_capacity);
  c.warmup = j.value("warmup", c.warmup);
  c.train_every = j.value("train_every", c.train_every);
  c.hidden = j.value("hidden", c.hidden);
  if (j.contains("encoder")) c.encoder = encoder_params_from_json(j["encoder"]);
  c.validate();
  return c;
}

int greedy_action(std::span<const double> q, std::uint32_t legal) {
  int best = -1;
  for (int a = 0; a < static_cast<int>(q.size()); ++a) {
    if (!(legal & (1u << a))) continue;
    if (best < 0 || q[static_cast<std::size_t>(a)] > q[static_cast<std::size_t>(best)]) best = a;
  }
  return best < 0 ? 0 : best;
}

std::vector<double> bellman_targets(const Mlp& target, std::span<const Transition* const> batch,
                                    double gamma) {
  std::vector<double> y(batch.size());
  // Evaluate all non-terminal next states in one batched pass.
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (!batch[i]->terminal) live.push_back(i);
  }
  Eigen::MatrixXd next_q;
  if (!live.empty()) {
    Eigen::MatrixXd inputs(target.input_size(), static_cast<Eigen::Index>(live.size()));
    for (std::size_t k = 0; k < live.size(); ++k) {
      const auto& v = batch[live[k]]->next_obs;
      inputs.col(static_cast<Eigen::Index>(k)) =
          Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    next_q = target.forward_batch(inputs);
  }
  std::size_t k = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = *batch[i];
    if (t.terminal) {
      y[i] = t.reward;
      continue;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < next_q.rows(); ++a) {
      if (t.next_legal & (1u << a)) best = std::max(best, next_q(a, static_cast<Eigen::Index>(k)));
    }
    if (!std::isfinite(best)) best = 0.0;
    y[i] = t.reward + std::pow(gamma, t.duration) * best;
    ++k;
  }
  return y;
}

Mlp::Gradients q_loss_gradient(const Mlp& online, std::span<const Transition* const> batch,
                               std::span<const double> targets, double* loss) {
  const auto n = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd inputs(online.input_size(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& v = batch[static_cast<std::size_t>(i)]->obs;
    inputs.col(i) = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  const Eigen::MatrixXd q = online.forward_batch(inputs);
  Eigen::MatrixXd upstream = Eigen::MatrixXd::Zero(q.rows(), n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int a = batch[static_cast<std::size_t>(i)]->action;
    const double err = q(a, i) - targets[static_cast<std::size_t>(i)];
    total += err * err;
    upstream(a, i) = 2.0 * err / static_cast<double>(n);
  }
  if (loss != nullptr) *loss = total / static_cast<double>(n);
  return online.gradient_batch(inputs, upstream);
}

double q_update(Mlp& online, const Mlp& target, std::span<const Transition* const> batch,
                double gamma, double lr) {
  if (batch.empty()) throw std::invalid_argument("q_update: empty batch");
  const auto y = bellman_targets(target, batch, gamma);
  double loss = 0.0;
  const auto grads = q_loss_gradient(online, batch, y, &loss);
  sgd_step(online, grads, lr);
  return loss;
}

DqnPolicy::DqnPolicy(DqnModel model, std::string name)
    : model_(std::move(model)), encoder_(model_.encoder), name_(std::move(name)) {
  if (static_cast<std::size_t>(model_.net.input_size()) != encoder_.length() ||
      model_.net.output_size() != kNumActions) {
    throw std::invalid_argument("DqnPolicy: network shape does not match encoder/action space");
  }
}

Action DqnPolicy::act(const GameState& s, UnitId unit) {
  const auto obs = encoder_.encode(s, unit);
  const Eigen::VectorXd q = model_.net.forward(obs.values);
  const std::uint32_t mask = legal_mask(legal_actions(s, unit));
  return Action::from_index(greedy_action({q.data(), static_cast<std::size_t>(q.size())}, mask));
}

DqnResult train_dqn(const Scenario& sc, Policy& adversary, const TrainConfig& cfg) {
  cfg.validate();
  const LocalEncoder encoder(cfg.encoder);
  std::vector<int> sizes{static_cast<int>(encoder.length())};
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(kNumActions);

  Rng rng(derive_seed(cfg.seed, 100));
  DqnResult result;
  Mlp online = Mlp::random(sizes, rng);
  Mlp target = online;
  AdamOptimizer adam;
  ReplayBuffer replay(cfg.replay_capacity);
  const Faction learner = Faction::blue;
  const int sign = faction_sign(learner);

  long long steps = 0;
  double window_sum = 0.0;
  int window_count = 0;

  for (int episode = 0; episode < cfg.episodes; ++episode) {
    const std::uint64_t seed = derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(episode));
    GameState s = initial_state(sc, seed);
    adversary.reset(policy_seed(seed, opponent(learner)));
    std::optional<Transition> pending;

    while (const auto unit = unit_on_move(s)) {
      if (s.phase != learner) {
        const Action a = adversary.act(s, *unit);
        const int r = step(s, *unit, a).reward;
        if (pending) pending->reward += sign * r;
        continue;
      }
      auto obs = encoder.encode(s, *unit);
      const auto legal = legal_actions(s, *unit);
      const std::uint32_t mask = legal_mask(legal);
      if (pending) {
        pending->next_obs = obs.values;
        pending->next_legal = mask;
        replay.push(std::move(*pending));
        pending.reset();
      }

      Action a;
      if (uniform_unit(rng) < cfg.epsilon(steps)) {
        a = legal[uniform_index(rng, legal.size())];
      } else {
        const Eigen::VectorXd q = online.forward(obs.values);
        a = Action::from_index(greedy_action({q.data(), static_cast<std::size_t>(q.size())}, mask));
      }
      Transition t;
      t.obs = std::move(obs.values);
      t.action = a.index();
      t.reward = sign * step(s, *unit, a).reward;
      pending = std::move(t);
      ++steps;

      if (static_cast<long long>(replay.size()) >= std::max(cfg.warmup, 1) &&
          steps % cfg.train_every == 0) {
        const auto batch = replay.sample(static_cast<std::size_t>(cfg.batch_size), rng);
        const auto y = bellman_targets(target, batch, cfg.gamma);
        double loss = 0.0;
        const auto grads = q_loss_gradient(online, batch, y, &loss);
        if (!std::isfinite(loss) || !grads.all_finite()) {
          throw TrainingDiverged("train_dqn: non-finite loss at episode " +
                                 std::to_string(episode) + ", step " + std::to_string(steps));
        }
        if (cfg.optimizer == "adam") {
          adam.step(online, grads, cfg.lr);
        } else {
          sgd_step(online, grads, cfg.lr);
        }
      }
      if (steps % cfg.target_sync == 0) target = online;
    }
    if (pending) {
      pending->terminal = true;
      pending->next_obs.assign(pending->obs.size(), 0.0);
      replay.push(std::move(*pending));
    }

    window_sum += s.score;
    if (++window_count == 100) {
      result.curve.push_back(window_sum / 100.0);
      window_sum = 0.0;
      window_count = 0;
    }
  }
  if (!online.all_finite()) throw TrainingDiverged("train_dqn: non-finite parameters");
  result.model = DqnModel{std::move(online), cfg.encoder};
  return result;
}

}  // namespace hexwar

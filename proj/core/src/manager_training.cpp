#include <algorithm>
#include <cmath>
#include <map>

#include "hexwar/hierarchy.hpp"

namespace hexwar {

namespace {

struct ActiveOption {
  int option = 0;
  int start_turn = 0;
  std::vector<double> features;
  double reward = 0.0;
  std::vector<int> step_rewards;
};

}  // namespace

ManagerTrainResult train_manager_options(const Scenario& sc, const UnitPolicy& unit_policy,
                                         Policy& adversary, const ManagerTrainConfig& cfg) {
  cfg.q.validate();
  const int n_options = num_options(*sc.board);
  if (n_options == 0) throw std::invalid_argument("train_manager_options: scenario has no objectives");
  if (n_options > 32) throw std::invalid_argument("train_manager_options: too many objectives");
  if (cfg.horizon < 1 || cfg.grid < 1) throw std::invalid_argument("train_manager_options: bad horizon/grid");
  const std::uint32_t all = n_options == 32 ? ~0u : (1u << n_options) - 1;

  std::vector<int> sizes{static_cast<int>(global_length(cfg.grid)) + 2};
  sizes.insert(sizes.end(), cfg.q.hidden.begin(), cfg.q.hidden.end());
  sizes.push_back(n_options);

  Rng rng(derive_seed(cfg.q.seed, 400));
  Mlp online = Mlp::random(sizes, rng);
  Mlp target = online;
  AdamOptimizer adam;
  ReplayBuffer replay(cfg.q.replay_capacity);
  const Faction learner = Faction::blue;
  const int sign = faction_sign(learner);

  ManagerTrainResult result;
  long long decisions = 0;
  double window_sum = 0.0;
  int window_count = 0;

  auto train_step = [&]() {
    if (static_cast<long long>(replay.size()) < std::max(cfg.q.warmup, 1) ||
        decisions % cfg.q.train_every != 0) {
      return;
    }
    const auto batch = replay.sample(static_cast<std::size_t>(cfg.q.batch_size), rng);
    const auto y = bellman_targets(target, batch, cfg.q.gamma);
    double loss = 0.0;
    const auto grads = q_loss_gradient(online, batch, y, &loss);
    if (!std::isfinite(loss) || !grads.all_finite()) {
      throw TrainingDiverged("train_manager_options: non-finite loss after " +
                             std::to_string(decisions) + " option decisions");
    }
    if (cfg.q.optimizer == "adam") {
      adam.step(online, grads, cfg.q.lr);
    } else {
      sgd_step(online, grads, cfg.q.lr);
    }
  };

  for (int episode = 0; episode < cfg.q.episodes; ++episode) {
    const std::uint64_t seed = derive_seed(cfg.q.seed, 5000 + static_cast<std::uint64_t>(episode));
    GameState s = initial_state(sc, seed);
    adversary.reset(policy_seed(seed, opponent(learner)));
    std::vector<ManagerAgent> managers = partition_units(s, learner);
    std::map<int, ActiveOption> active;
    int boundary_turn = -1;

    auto close = [&](int mid, const std::vector<double>* next, bool terminal) {
      ActiveOption& a = active.at(mid);
      Transition t;
      t.obs = a.features;
      t.action = a.option;
      t.reward = a.reward;
      t.terminal = terminal;
      t.duration = std::max(1, s.turn - a.start_turn);
      t.next_obs = next != nullptr ? *next : std::vector<double>(a.features.size(), 0.0);
      t.next_legal = all;
      if (cfg.record_options) {
        result.options.push_back({episode, mid, a.option, a.start_turn, s.turn - a.start_turn,
                                  a.step_rewards, a.reward});
      }
      replay.push(std::move(t));
      active.erase(mid);
    };

    while (const auto unit = unit_on_move(s)) {
      if (s.phase == learner && s.turn != boundary_turn) {
        boundary_turn = s.turn;
        for (auto& m : managers) {
          std::erase_if(m.units, [&](UnitId id) { return s.find(id) == nullptr; });
          if (m.units.empty()) {
            if (active.contains(m.id)) close(m.id, nullptr, true);
            continue;
          }
          auto it = active.find(m.id);
          if (it != active.end() && s.turn - it->second.start_turn < cfg.horizon) continue;
          auto features = manager_features(s, m, cfg.grid);
          if (it != active.end()) close(m.id, &features, false);

          int option;
          if (uniform_unit(rng) < cfg.q.epsilon(decisions)) {
            option = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n_options)));
          } else {
            const Eigen::VectorXd q = online.forward(features);
            option = greedy_action({q.data(), static_cast<std::size_t>(q.size())}, all);
          }
          const Assignment a = option_assignment(*s.board, option);
          m.assignment = a;
          m.subgoals.clear();
          for (UnitId id : m.units) {
            m.subgoals[id] = ActiveSubgoal{Subgoal{a.target, a.posture, cfg.horizon}, s.turn, -1};
          }
          active[m.id] = ActiveOption{option, s.turn, std::move(features), 0.0, {}};
          ++decisions;
          train_step();
          if (decisions % cfg.q.target_sync == 0) target = online;
        }
      }

      Action a = Action::pass();
      if (s.phase == learner) {
        for (const auto& m : managers) {
          if (auto it = m.subgoals.find(*unit); it != m.subgoals.end()) {
            a = unit_policy(s, *unit, it->second.goal);
            break;
          }
        }
      } else {
        a = adversary.act(s, *unit);
      }
      const int turn_before = s.turn;
      const int r = step(s, *unit, a).reward;
      for (auto& [mid, opt] : active) {
        opt.step_rewards.push_back(r);
        opt.reward += std::pow(cfg.q.gamma, turn_before - opt.start_turn) * sign * r;
      }
    }
    while (!active.empty()) close(active.begin()->first, nullptr, true);

    window_sum += s.score;
    if (++window_count == 100) {
      result.curve.push_back(window_sum / 100.0);
      window_sum = 0.0;
      window_count = 0;
    }
  }
  if (!online.all_finite()) throw TrainingDiverged("train_manager_options: non-finite parameters");
  result.model = ManagerModel{std::move(online), cfg.grid, cfg.horizon,
                              static_cast<int>(sc.board->objectives.size())};
  return result;
}

}  // namespace hexwar

#include "hexwar/qlearning.hpp"

#include <algorithm>
#include <limits>
#include <optional>

namespace hexwar {

std::string state_key(const GameState& s) {
  std::string key = std::to_string(s.turn) + (s.phase == Faction::blue ? "b" : "r");
  for (const auto& u : s.units) {
    key += '|';
    key += std::to_string(u.id) + ',' + std::to_string(u.pos.q) + ',' + std::to_string(u.pos.r) +
           ',' + std::to_string(u.strength) + (u.acted ? ",1" : ",0");
  }
  return key;
}

double QTable::get(const std::string& key, int action) const {
  auto it = rows_.find(key);
  return it == rows_.end() ? 0.0 : it->second[static_cast<std::size_t>(action)];
}

void QTable::set(const std::string& key, int action, double value) {
  auto [it, inserted] = rows_.try_emplace(key);
  if (inserted) it->second.fill(0.0);
  it->second[static_cast<std::size_t>(action)] = value;
}

const QTable::Row* QTable::find(const std::string& key) const {
  auto it = rows_.find(key);
  return it == rows_.end() ? nullptr : &it->second;
}

Action QTable::greedy(const std::string& key, const std::vector<Action>& legal) const {
  std::vector<Action> sorted = legal;
  std::sort(sorted.begin(), sorted.end(),
            [](Action a, Action b) { return a.index() < b.index(); });
  Action best = sorted.front();
  double best_v = get(key, best.index());
  for (Action a : sorted) {
    const double v = get(key, a.index());
    if (v > best_v) {
      best = a;
      best_v = v;
    }
  }
  return best;
}

double QTable::max_value(const std::string& key, const std::vector<Action>& legal) const {
  double best = -std::numeric_limits<double>::infinity();
  for (Action a : legal) best = std::max(best, get(key, a.index()));
  return best;
}

TabularResult tabular_q_learn(const Scenario& sc, Policy& adversary, const TabularConfig& cfg) {
  if (sc.board->width * sc.board->height > 16 || sc.units.size() > 2) {
    throw StateSpaceOverflow(
        "tabular_q_learn accepts boards of at most 16 hexes with at most 2 units; scenario '" +
        sc.name() + "' has " + std::to_string(sc.board->width * sc.board->height) + " hexes and " +
        std::to_string(sc.units.size()) + " units");
  }
  if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0) || !(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) {
    throw std::invalid_argument("tabular_q_learn: gamma in [0,1) and alpha in (0,1] required");
  }
  const Faction learner = Faction::blue;
  const int sign = faction_sign(learner);
  Rng rng(derive_seed(cfg.seed, 200));
  TabularResult result;
  QTable& q = result.table;

  auto epsilon = [&](long long t) {
    if (cfg.eps_decay_steps <= 0 || t >= cfg.eps_decay_steps) return cfg.eps_end;
    return cfg.eps_start +
           (cfg.eps_end - cfg.eps_start) * static_cast<double>(t) /
               static_cast<double>(cfg.eps_decay_steps);
  };

  struct Pending {
    std::string key;
    int action;
    double reward;
  };

  long long t = 0;
  while (t < cfg.steps) {
    const std::uint64_t seed = derive_seed(cfg.seed, 3000 + static_cast<std::uint64_t>(result.episodes));
    GameState s = initial_state(sc, seed);
    adversary.reset(policy_seed(seed, opponent(learner)));
    std::optional<Pending> pending;
    while (const auto unit = unit_on_move(s)) {
      if (s.phase != learner) {
        const int r = step(s, *unit, adversary.act(s, *unit)).reward;
        if (pending) pending->reward += sign * r;
        continue;
      }
      const std::string key = state_key(s);
      const auto legal = legal_actions(s, *unit);
      if (pending) {
        const double target = pending->reward + cfg.gamma * q.max_value(key, legal);
        const double old = q.get(pending->key, pending->action);
        q.set(pending->key, pending->action, old + cfg.alpha * (target - old));
      }
      if (t >= cfg.steps) {
        pending.reset();
        break;
      }
      // Touch the row so every visited state is recorded.
      if (q.find(key) == nullptr) q.set(key, 0, 0.0);
      if (q.size() > cfg.max_states) {
        throw StateSpaceOverflow("tabular_q_learn: more than " + std::to_string(cfg.max_states) +
                                 " states visited");
      }
      const Action a = uniform_unit(rng) < epsilon(t) ? legal[uniform_index(rng, legal.size())]
                                                      : q.greedy(key, legal);
      pending = Pending{key, a.index(), static_cast<double>(sign * step(s, *unit, a).reward)};
      ++t;
    }
    if (pending) {
      const double old = q.get(pending->key, pending->action);
      q.set(pending->key, pending->action, old + cfg.alpha * (pending->reward - old));
    }
    ++result.episodes;
  }
  return result;
}

}  // namespace hexwar

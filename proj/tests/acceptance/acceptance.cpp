// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails. Pass criterion names as arguments to run a subset.

#include <array>
#include <chrono>
#include <cmath>
#include <deque>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "fixtures.hpp"
#include "hexwar/behaviors.hpp"
#include "hexwar/dqn.hpp"
#include "hexwar/episode.hpp"
#include "hexwar/hierarchy.hpp"
#include "hexwar/mlp.hpp"
#include "hexwar/multimodel.hpp"
#include "hexwar/observation.hpp"
#include "hexwar/qlearning.hpp"
#include "hexwar/score_model.hpp"
#include "hexwar_tools/server.hpp"
#include "value_iteration.hpp"

using namespace hexwar;
using namespace hexwar::testing;
using nlohmann::json;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }
Outcome pass(std::string what) { return {true, std::move(what)}; }

template <class... Ts>
std::string fmt(const Ts&... parts) {
  std::ostringstream out;
  (out << ... << parts);
  return out.str();
}

struct MeanCi {
  double mean = 0, var = 0;
  int n = 0;
};

MeanCi moments(const std::vector<double>& xs) {
  MeanCi m;
  m.n = static_cast<int>(xs.size());
  for (double x : xs) m.mean += x;
  m.mean /= m.n;
  for (double x : xs) m.var += (x - m.mean) * (x - m.mean);
  m.var /= (m.n - 1);
  return m;
}

// Lower end of a 95% (one-sided z) interval for mean(a) - mean(b), unequal variances.
double diff_lower_bound(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ma = moments(a), mb = moments(b);
  return (ma.mean - mb.mean) - 1.959963984540054 * std::sqrt(ma.var / ma.n + mb.var / mb.n);
}

std::vector<double> eval_scores(const Scenario& sc, Policy& blue, Policy& red, int n, std::uint64_t base) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(run_episode(sc, blue, red, base + static_cast<std::uint64_t>(i)).final_score);
  return out;
}

// ---------------------------------------------------------------- hexgrid

Outcome hex_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  static constexpr std::array<HexCoord, 6> kSteps{{{1, 0}, {1, -1}, {0, -1}, {-1, 0}, {-1, 1}, {0, 1}}};
  std::vector<HexCoord> cells;
  for (int q = -8; q <= 8; ++q)
    for (int r = -8; r <= 8; ++r)
      if (std::abs(q) + std::abs(r) + std::abs(q + r) <= 16) cells.push_back({q, r});
  std::size_t pairs = 0;
  for (HexCoord src : cells) {
    std::map<std::pair<int, int>, int> dist{{{src.q, src.r}, 0}};
    std::deque<HexCoord> frontier{src};
    while (!frontier.empty()) {
      const HexCoord c = frontier.front();
      frontier.pop_front();
      const int d = dist[{c.q, c.r}];
      if (d >= 16) continue;
      for (HexCoord s : kSteps) {
        const HexCoord n{c.q + s.q, c.r + s.r};
        if (dist.emplace(std::make_pair(n.q, n.r), d + 1).second) frontier.push_back(n);
      }
    }
    for (HexCoord dst : cells) {
      ++pairs;
      if (distance(src, dst) != dist.at({dst.q, dst.r})) return fail(fmt("distance mismatch at ", src.q, ",", src.r));
    }
  }
  for (int r = 1; r <= 6; ++r) {
    const auto rg = ring({3, -2}, r);
    const auto dk = disk({3, -2}, r);
    if (rg.size() != static_cast<std::size_t>(6 * r)) return fail(fmt("ring ", r, " has ", rg.size()));
    if (dk.size() != static_cast<std::size_t>(3 * r * (r + 1) + 1)) return fail(fmt("disk ", r, " has ", dk.size()));
    std::set<std::pair<int, int>> uniq;
    for (HexCoord c : rg) {
      if (distance(c, {3, -2}) != r) return fail("ring cell at wrong distance");
      uniq.insert({c.q, c.r});
    }
    if (uniq.size() != rg.size()) return fail("ring has duplicates");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= 1.0) return fail(fmt("took ", secs, " s"));
  return pass(fmt(pairs, " pairs match BFS; ring/disk counts r=1..6"));
}

// ---------------------------------------------------------------- engine

Outcome engine_determinism() {
  const std::vector<std::string> scenarios{"mirror6.json", "skirmish5.json", "duel3.json", "brigade20.json"};
  const std::vector<std::pair<std::string, std::string>> pairs{
      {"random", "random"}, {"greedy", "random"}, {"hold", "greedy"}, {"goal", "random"}, {"random", "hold"}};
  std::size_t snapshots = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Scenario sc = scenario_file(scenarios[seed % scenarios.size()]);
    const auto& [b, r] = pairs[seed % pairs.size()];
    std::string bytes[2];
    EpisodeLog log;
    for (auto& out : bytes) {
      auto blue = make_behavior(b);
      auto red = make_behavior(r);
      log = run_episode(sc, *blue, *red, seed);
      out = to_ndjson(log);
    }
    if (bytes[0] != bytes[1]) return fail(fmt("episode ", seed, " differs between runs"));
    replay(sc, log, [&](const GameState&, const StepRecord&) { ++snapshots; });
  }
  return pass(fmt("100 episodes byte-identical across 4 scenarios; ", snapshots, " snapshots reproduced by replay"));
}

Outcome conservation() {
  Rng rng(77);
  std::size_t steps = 0;
  for (int ep = 0; ep < 1000; ++ep) {
    const Scenario sc = random_scenario(rng, 3 + static_cast<int>(uniform_index(rng, 8)),
                                        3 + static_cast<int>(uniform_index(rng, 8)),
                                        1 + static_cast<int>(uniform_index(rng, 5)),
                                        1 + static_cast<int>(uniform_index(rng, 5)),
                                        2 + static_cast<int>(uniform_index(rng, 8)));
    RandomPolicy blue, red;
    const auto log = run_episode(sc, blue, red, static_cast<std::uint64_t>(ep));
    // Snapshots after each step: the next record's pre-state, or the replayed end.
    std::vector<json> after;
    for (std::size_t i = 1; i < log.records.size(); ++i) after.push_back(log.records[i].state);
    GameState end = initial_state(sc, log.seed);
    for (const auto& r : log.records) step(end, r.unit, r.action);
    after.push_back(snapshot(end));

    long long total = 0;
    for (std::size_t i = 0; i < log.records.size(); ++i) {
      const json& pre = log.records[i].state;
      const json& post = after[i];
      std::map<int, int> before;
      int lost[2] = {0, 0};  // blue, red
      for (const auto& u : pre["units"]) before[u["id"].get<int>()] = u["strength"].get<int>();
      std::map<int, int> now;
      for (const auto& u : post["units"]) now[u["id"].get<int>()] = u["strength"].get<int>();
      for (const auto& u : pre["units"]) {
        const int id = u["id"];
        const int s1 = now.contains(id) ? now[id] : 0;
        if (s1 > before[id]) return fail(fmt("episode ", ep, ": unit ", id, " gained strength"));
        lost[u["faction"] == "blue" ? 0 : 1] += before[id] - s1;
      }
      for (const auto& [id, s] : now)
        if (!before.contains(id)) return fail("unit appeared");
      int reward = lost[1] - lost[0];
      if (post["turn"].get<int>() > pre["turn"].get<int>()) {
        for (const auto& o : sc.board->objectives) {
          for (const auto& u : post["units"]) {
            if (u["q"] == o.pos.q && u["r"] == o.pos.r) reward += (u["faction"] == "blue" ? 1 : -1) * o.value;
          }
        }
      }
      if (reward != log.records[i].reward) return fail(fmt("episode ", ep, " step ", i, ": reward ", log.records[i].reward, " vs recomputed ", reward));
      if (post["score"].get<int>() != pre["score"].get<int>() + reward) return fail("score does not accumulate rewards");
      total += reward;
      ++steps;
    }
    if (total != log.final_score) return fail(fmt("episode ", ep, ": final score ", log.final_score, " vs sum ", total));
  }
  return pass(fmt("1000 fuzzed episodes, ", steps, " steps: strength non-increasing, rewards recomputed"));
}

// ---------------------------------------------------------------- observation

GameState embed(const GameState& small, int w, int h, HexCoord offset) {
  const Board& sb = *small.board;
  auto b = make_board(w, h, sb.max_turns);
  std::fill(b->terrain.begin(), b->terrain.end(), TerrainKind::water);
  for (int r = 0; r < sb.height; ++r)
    for (int q = 0; q < sb.width; ++q)
      b->terrain[static_cast<std::size_t>((r + offset.r) * w + q + offset.q)] = sb.terrain_at({q, r});
  for (auto o : sb.objectives) b->objectives.push_back({o.pos + offset, o.value});
  std::vector<Unit> units = small.units;
  for (auto& u : units) u.pos = u.pos + offset;
  GameState s = make_state(b, units);
  s.turn = small.turn;
  return s;
}

Outcome observation_translation() {
  Rng rng(101);
  const EncoderParams p;
  int compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    GameState small = initial_state(random_scenario(rng, 5, 5, 2, 2), 0);
    const HexCoord offset{15 + static_cast<int>(uniform_index(rng, 20)), 15 + static_cast<int>(uniform_index(rng, 20))};
    const GameState big = embed(small, 50, 50, offset);
    for (const Unit& u : small.units) {
      if (encode_local(small, u.id, p).values != encode_local(big, u.id, p).values)
        return fail(fmt("trial ", trial, " unit ", u.id, " differs"));
      ++compared;
    }
  }
  return pass(fmt(compared, " vectors identical between 5x5 and translated 50x50"));
}

Outcome observation_locality() {
  Rng rng(102);
  const EncoderParams p;
  for (int trial = 0; trial < 500; ++trial) {
    GameState s = initial_state(random_scenario(rng, 40, 40, 4, 4), 0);
    const Unit me = s.units[uniform_index(rng, s.units.size())];
    const auto base = encode_local(s, me.id, p).values;
    auto board = std::make_shared<Board>(*s.board);
    GameState t = s;
    t.board = board;
    for (int k = 0; k < 20; ++k) {
      HexCoord far;
      do far = {static_cast<int>(uniform_index(rng, 40)), static_cast<int>(uniform_index(rng, 40))};
      while (distance(far, me.pos) < p.horizon);
      board->terrain[static_cast<std::size_t>(far.r * 40 + far.q)] = static_cast<TerrainKind>(uniform_index(rng, 4));
      std::erase_if(t.units, [&](const Unit& u) { return u.pos == far; });
      if (board->passable(far) && uniform_index(rng, 2))
        t.units.push_back(unit(1000 + k, uniform_index(rng, 2) ? Faction::red : Faction::blue, far,
                               1 + static_cast<int>(uniform_index(rng, 100))));
    }
    std::sort(t.units.begin(), t.units.end(), [](const Unit& a, const Unit& b) { return a.id < b.id; });
    if (encode_local(t, me.id, p).values != base) return fail(fmt("trial ", trial, " changed"));
  }
  return pass("500 states x 20 perturbations at distance >= D0: vectors unchanged");
}

Outcome observation_accumulation() {
  Rng rng(103);
  EncoderParams p;
  p.cap = 1e9;  // effectively pre-clamp
  double worst = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const GameState s = initial_state(random_scenario(rng, 30, 30, 8, 8), 0);
    const Unit& me = s.units[uniform_index(rng, s.units.size())];
    const std::size_t n = static_cast<std::size_t>(disk_size(p.radius));
    std::vector<double> want(kNumLocalChannels * n, 0.0);
    for (int dq = -p.horizon; dq <= p.horizon; ++dq) {
      for (int dr = -p.horizon; dr <= p.horizon; ++dr) {
        const HexCoord c{me.pos.q + dq, me.pos.r + dr};
        const int d = distance(c, me.pos);
        if (d >= p.horizon) continue;
        const auto v = cell_channels(s, me.faction, c, std::nullopt);
        const int slot = disk_index(me.pos, d <= p.radius ? c : radial_target(me.pos, c, p.radius), p.radius);
        const double w = d <= p.radius ? 1.0 : static_cast<double>(p.horizon - d) / (p.horizon - p.radius);
        for (int ch = 0; ch < kNumLocalChannels; ++ch) want[static_cast<std::size_t>(ch) * n + static_cast<std::size_t>(slot)] += w * v[ch];
      }
    }
    const auto got = encode_local(s, me.id, p).values;
    for (std::size_t i = 0; i < want.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
  }
  if (worst >= 1e-12) return fail(fmt("max deviation ", worst));
  return pass(fmt("300 states, max deviation from brute force ", worst));
}

Outcome decay_properties() {
  const int R = 3, D0 = 12;
  double prev = 1.0;
  for (int d = 0; d <= 20; ++d) {
    const double w = decay_weight(d, R, D0);
    const double want = d <= R ? 1.0 : d >= D0 ? 0.0 : (D0 - d) / 9.0;
    if (std::abs(w - want) > 1e-15) return fail(fmt("w(", d, ") = ", w));
    if (w > prev) return fail("not monotone");
    prev = w;
  }
  // The encoder applies the same weights: one enemy on an empty board at each distance.
  for (int d = R + 1; d < D0 + 2; ++d) {
    const GameState s = make_state(make_board(40, 3), {unit(0, Faction::blue, {2, 1}), unit(1, Faction::red, {2 + d, 1}, 60)});
    const auto v = encode_local(s, 0, EncoderParams{}).values;
    const std::size_t n = static_cast<std::size_t>(disk_size(R));
    double enemy = 0;
    for (std::size_t i = 0; i < n; ++i) enemy += v[kEnemy * n + i];
    if (std::abs(enemy - 0.6 * decay_weight(d, R, D0)) > 1e-12) return fail(fmt("encoder weight at d=", d));
  }
  return pass("w=1 for d<=3, (12-d)/9 between, 0 from 12; encoder agrees");
}

// ---------------------------------------------------------------- learning

Outcome gradient_check() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(104);
  double worst = 0;
  for (int net_i = 0; net_i < 100; ++net_i) {
    std::vector<int> sizes{1 + static_cast<int>(uniform_index(rng, 6))};
    const int depth = 1 + static_cast<int>(uniform_index(rng, 3));
    for (int l = 0; l < depth; ++l) sizes.push_back(1 + static_cast<int>(uniform_index(rng, 7)));
    Mlp net = Mlp::random(sizes, rng);
    {
      // Zero biases put units behind a dead layer exactly on the rectifier's kink.
      auto p = net.flatten();
      for (auto& v : p) v += 0.1 * (2 * uniform_unit(rng) - 1);
      net.unflatten(p);
    }
    std::vector<double> x(static_cast<std::size_t>(sizes.front())), up(static_cast<std::size_t>(sizes.back()));
    for (auto& v : x) v = 2 * uniform_unit(rng) - 1;
    for (auto& v : up) v = 2 * uniform_unit(rng) - 1;
    auto loss = [&](const Mlp& m) {
      const auto y = m.forward(x);
      double s = 0;
      for (std::size_t i = 0; i < up.size(); ++i) s += up[i] * y(static_cast<Eigen::Index>(i));
      return s;
    };
    Mlp grads_as_net = net;
    const auto g = net.gradient(x, up);
    grads_as_net.layers() = g.layers;
    const auto analytic = grads_as_net.flatten();
    auto params = net.flatten();
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double h = 1e-6, orig = params[i];
      params[i] = orig + h;
      net.unflatten(params);
      const double fp = loss(net);
      params[i] = orig - h;
      net.unflatten(params);
      const double fm = loss(net);
      params[i] = orig;
      net.unflatten(params);
      const double numeric = (fp - fm) / (2 * h);
      const double rel = std::abs(numeric - analytic[i]) / std::max({std::abs(numeric), std::abs(analytic[i]), 1e-6});
      worst = std::max(worst, rel);
    }
  }
  if (const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); secs >= 60)
    return fail(fmt("took ", secs, " s"));
  if (worst >= 1e-4) return fail(fmt("max relative error ", worst));
  return pass(fmt("100 nets, max relative error ", worst));
}

Outcome tabular_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario sc = scenario_file("duel3.json");
  GreedyAttackPolicy red;
  TabularConfig cfg;
  cfg.steps = 50000;
  cfg.seed = 1;
  const auto res = tabular_q_learn(sc, red, cfg);
  std::size_t checked = 0;
  const double frac = greedy_optimal_fraction(sc, res.table, red, cfg.gamma, &checked);
  const std::string detail = fmt("greedy optimal on ", frac * 100, "% of ", checked, " visited states (", res.episodes, " episodes)");
  if (const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); secs >= 120)
    return fail(fmt("took ", secs, " s"));
  return frac >= 0.95 ? pass(detail) : fail(detail);
}

Outcome dqn_vs_random() {
  const Scenario sc = scenario_file("skirmish5.json");
  PassPolicy adversary;
  TrainConfig cfg;
  cfg.episodes = 20000;
  cfg.seed = 7;
  cfg.hidden = {64, 64};
  cfg.optimizer = "adam";
  cfg.lr = 5e-4;
  cfg.gamma = 0.95;
  cfg.batch_size = 32;
  cfg.train_every = 4;
  cfg.target_sync = 2000;
  cfg.eps_decay_steps = 150000;
  cfg.replay_capacity = 50000;
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = train_dqn(sc, adversary, cfg);
  const double minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60;
  DqnPolicy dqn(res.model);
  RandomPolicy random;
  PassPolicy red;
  const auto a = eval_scores(sc, dqn, red, 100, 900000);
  const auto b = eval_scores(sc, random, red, 100, 900000);
  const double lower = diff_lower_bound(a, b);
  const std::string detail = fmt("trained 20000 episodes in ", minutes, " min; eval mean ", moments(a).mean,
                                 " vs random ", moments(b).mean, ", 95% lower bound on gap ", lower);
  return lower > 0 && minutes < 30 ? pass(detail) : fail(detail);
}

Outcome score_model() {
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario sc = scenario_file("mirror6.json");
  RandomPolicy blue;
  GreedyAttackPolicy red;
  std::vector<EpisodeLog> logs;
  for (int i = 0; i < 2000; ++i) logs.push_back(run_episode(sc, blue, red, static_cast<std::uint64_t>(i)));
  ScoreTrainConfig cfg;
  cfg.behavior = "random";
  cfg.adversary = "greedy";
  cfg.epochs = 10;
  cfg.seed = 5;
  const auto res = train_score_model(sc, logs, cfg);
  const std::string detail = fmt("2000 episodes: held-out MSE ", res.heldout_mse, " vs mean baseline ", res.baseline_mse);
  if (const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); secs >= 600)
    return fail(fmt("took ", secs, " s"));
  return res.heldout_mse < res.baseline_mse ? pass(detail) : fail(detail);
}

// ---------------------------------------------------------------- multi-model

ScorePredictor random_predictor(Rng& rng) {
  ScorePredictor p;
  p.net = Mlp::random({static_cast<int>(global_length(p.grid)), 8, 1}, rng);
  return p;
}

ScorePredictor constant_predictor(double v) {
  ScorePredictor p;
  p.net = Mlp({static_cast<int>(global_length(p.grid)), 1});
  p.offset = v;
  return p;
}

Outcome multimodel_singleton() {
  Rng rng(105);
  int states = 0;
  for (const std::string name : {"greedy", "hold", "goal", "random"}) {
    std::vector<RepositoryEntry> repo;
    repo.push_back({make_behavior(name), random_predictor(rng)});
    MultiModel mm(Faction::blue, std::move(repo));
    auto plain = make_behavior(name);
    mm.reset(3);
    plain->reset(3);
    for (int i = 0; i < 1000; ++i, ++states) {
      const GameState s = initial_state(random_scenario(rng, 8, 8, 3, 3), 0);
      if (mm.act(s, 0) != plain->act(s, 0)) return fail(fmt(name, " differs at state ", i));
    }
  }
  return pass(fmt(states, " states: singleton repository acts like its behavior"));
}

Outcome multimodel_monotone() {
  Rng rng(106);
  std::vector<std::pair<const char*, std::function<double(double)>>> transforms{
      {"affine", [](double x) { return 3 * x - 7; }},
      {"exp", [](double x) { return std::exp(x / 50); }},
      {"cube", [](double x) { return x * x * x; }},
      {"atan", [](double x) { return std::atan(x); }}};
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<RepositoryEntry> repo;
    std::vector<ScorePredictor> preds;
    const std::size_t k = 2 + uniform_index(rng, 4);
    for (std::size_t i = 0; i < k; ++i) {
      preds.push_back(random_predictor(rng));
      repo.push_back({make_behavior("hold"), preds.back()});
    }
    MultiModel mm(Faction::blue, std::move(repo));
    const GameState s = initial_state(random_scenario(rng, 8, 8, 3, 3), 0);
    const auto scores = mm.predict_all(s);
    for (Faction f : {Faction::blue, Faction::red}) {
      const auto want = select_best(scores, f);
      for (const auto& [name, t] : transforms) {
        std::vector<double> mapped;
        for (double x : scores) mapped.push_back(t(x));
        if (select_best(mapped, f) != want) return fail(fmt("trial ", trial, ": ", name, " changes the choice"));
      }
    }
  }
  return pass("1000 repositories x 4 increasing transforms x both sides: same selection");
}

Outcome multimodel_forced() {
  const Scenario sc = scenario_file("mirror6.json");
  for (std::size_t dominant = 0; dominant < 3; ++dominant) {
    std::vector<RepositoryEntry> repo;
    const char* names[] = {"greedy", "hold", "goal"};
    for (std::size_t i = 0; i < 3; ++i) repo.push_back({make_behavior(names[i]), constant_predictor(i == dominant ? 100 : -static_cast<double>(i))});
    MultiModel mm(Faction::blue, std::move(repo));
    RandomPolicy red;
    for (std::uint64_t seed = 0; seed < 20; ++seed) run_episode(sc, mm, red, seed);
    for (const auto& d : mm.decisions())
      if (d.selected != dominant) return fail(fmt("selected ", d.selected, " instead of ", dominant));
    if (mm.decisions().empty()) return fail("no decisions recorded");
  }
  return pass("dominant predictor selected at every decision (3 repositories x 20 episodes)");
}

// ---------------------------------------------------------------- hierarchy

Outcome hierarchy_partition() {
  Rng rng(107);
  int groups = 0, flagged = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const GameState s = initial_state(random_scenario(rng, 8 + static_cast<int>(uniform_index(rng, 15)),
                                                      8 + static_cast<int>(uniform_index(rng, 15)),
                                                      1 + static_cast<int>(uniform_index(rng, 30)), 3),
                                      0);
    std::set<UnitId> seen;
    std::size_t blue = 0;
    for (const auto& u : s.units) blue += u.faction == Faction::blue;
    for (const auto& m : partition_units(s, Faction::blue)) {
      ++groups;
      const auto n = m.units.size();
      if (n > 5) return fail(fmt("group of ", n));
      if (n < 3 && !m.remainder) return fail(fmt("unflagged group of ", n));
      if (n >= 3 && m.remainder) return fail("full group flagged as remainder");
      flagged += m.remainder;
      for (UnitId id : m.units)
        if (!seen.insert(id).second) return fail("unit in two groups");
    }
    if (seen.size() != blue) return fail("partition misses units");
  }
  return pass(fmt("200 states, ", groups, " groups, sizes in [3,5] except ", flagged, " flagged remainders"));
}

Outcome hierarchy_persistence() {
  Rng rng(108);
  HierarchyConfig cfg;
  int kept = 0, reissued = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Scenario sc = random_scenario(rng, 12, 12, 8, 6, 12);
    GameState s = initial_state(sc, static_cast<std::uint64_t>(trial));
    auto managers = partition_units(s, Faction::blue);
    RandomPolicy mover;
    mover.reset(static_cast<std::uint64_t>(trial));
    int last_turn = -1;
    while (const auto u = unit_on_move(s)) {
      if (s.phase == Faction::blue && s.turn != last_turn) {
        last_turn = s.turn;
        for (auto& m : managers) {
          std::erase_if(m.units, [&](UnitId id) { return s.find(id) == nullptr; });
          // Fresh random orders every turn; persistence must hold regardless.
          m.assignment = Assignment{{static_cast<int>(uniform_index(rng, 12)), static_cast<int>(uniform_index(rng, 12))},
                                    static_cast<Posture>(uniform_index(rng, 3)), -1};
          const auto before = m.subgoals;
          manager_decide(m, s, cfg);
          for (UnitId id : m.units) {
            const auto it = before.find(id);
            if (it == before.end()) continue;
            const ActiveSubgoal& old = it->second;
            const ActiveSubgoal& now = m.subgoals.at(id);
            const bool expired = s.turn - old.issued_turn >= cfg.horizon;
            const bool satisfied = (old.goal.posture == Posture::seize && s.find(id)->pos == old.goal.target) ||
                                   (old.goal.posture == Posture::attrit && old.target_unit >= 0 && s.find(old.target_unit) == nullptr);
            if (!expired && !satisfied) {
              if (now.goal != old.goal || now.issued_turn != old.issued_turn) return fail(fmt("subgoal replaced early at turn ", s.turn));
              ++kept;
            } else {
              if (now.issued_turn != s.turn) return fail("expired subgoal not reissued");
              ++reissued;
            }
          }
        }
      }
      step(s, *u, mover.act(s, *u));
    }
  }
  return pass(fmt(kept, " subgoals held within the horizon, ", reissued, " reissued on expiry or satisfaction"));
}

Outcome hierarchy_agent() {
  const Scenario sc = scenario_file("brigade20.json");
  int blue_units = 0;
  for (const auto& u : sc.units) blue_units += u.faction == Faction::blue;
  HierarchicalPolicy h;
  RandomPolicy random;
  GreedyAttackPolicy red;
  std::vector<double> a, b;
  int illegal = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    try {
      a.push_back(run_episode(sc, h, red, seed).final_score);
    } catch (const EpisodeAborted&) {
      ++illegal;
    }
    b.push_back(run_episode(sc, random, red, seed).final_score);
  }
  if (illegal > 0) return fail(fmt(illegal, " episodes aborted on illegal actions"));
  const double lower = diff_lower_bound(a, b);
  const std::string detail = fmt(blue_units, " units, 100 episodes, 0 illegal; mean ", moments(a).mean, " vs random ",
                                 moments(b).mean, ", 95% lower bound on gap ", lower);
  return lower > 0 ? pass(detail) : fail(detail);
}

// ---------------------------------------------------------------- server

Outcome server_equivalence() {
  namespace websocket = boost::beast::websocket;
  using tcp = boost::asio::ip::tcp;
  const Scenario sc = scenario_file("skirmish5.json");
  tools::ServerConfig cfg;
  cfg.scenario = sc;
  cfg.red_policy = "random";
  cfg.seed = 500;
  cfg.port = 0;
  tools::PlayServer server(cfg);
  server.start();
  int games = 0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const std::uint64_t seed = cfg.seed + k;  // the server seeds connection k with base + k
    // The fixed action list: blue's moves from a direct greedy-vs-random game.
    std::vector<Action> script;
    {
      GreedyAttackPolicy blue;
      RandomPolicy red;
      for (const auto& r : run_episode(sc, blue, red, seed).records)
        if (r.faction == Faction::blue) script.push_back(r.action);
    }
    boost::asio::io_context ioc;
    websocket::stream<tcp::socket> ws(ioc);
    ws.next_layer().connect({boost::asio::ip::make_address("127.0.0.1"), server.port()});
    ws.handshake("127.0.0.1", "/play");
    std::deque<json> inbox;
    auto next = [&] {
      while (inbox.empty()) {
        boost::beast::flat_buffer buf;
        ws.read(buf);
        std::istringstream in(boost::beast::buffers_to_string(buf.data()));
        for (std::string line; std::getline(in, line);)
          if (!line.empty()) inbox.push_back(json::parse(line));
      }
      json m = inbox.front();
      inbox.pop_front();
      return m;
    };
    int final_score = 0;
    std::size_t sent = 0;
    for (bool done = false; !done;) {
      const json m = next();
      if (m["type"] == "prompt") {
        if (sent == script.size()) return fail("server prompted beyond the action list");
        ws.write(boost::asio::buffer(
            json{{"type", "act"}, {"unit", m["unit"]}, {"action", action_to_json(script[sent++])}}.dump() + "\n"));
      } else if (m["type"] == "gameover") {
        final_score = m["final_score"];
        done = true;
      } else if (m["type"] == "error") {
        return fail("server rejected a scripted action: " + m.dump());
      }
    }
    ws.close(websocket::close_code::normal);
    // The same list through run_episode directly.
    std::size_t replayed = 0;
    struct Scripted final : Policy {
      const std::vector<Action>* actions;
      std::size_t* at;
      std::string name() const override { return "scripted"; }
      Action act(const GameState&, UnitId) override { return (*actions)[(*at)++]; }
    } blue;
    blue.actions = &script;
    blue.at = &replayed;
    RandomPolicy red;
    const int direct = run_episode(sc, blue, red, seed).final_score;
    if (sent != script.size() || replayed != script.size()) return fail("action list not fully consumed");
    if (direct != final_score) return fail(fmt("seed ", seed, ": server ", final_score, " vs run_episode ", direct));
    ++games;
  }
  server.stop();
  return pass(fmt(games, " fixed action lists over WebSocket give run_episode's final scores"));
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"hex_distance_and_rings", hex_oracle},
      {"engine_determinism_and_replay", engine_determinism},
      {"strength_and_score_conservation", conservation},
      {"observation_translation_invariance", observation_translation},
      {"observation_locality", observation_locality},
      {"observation_accumulation_oracle", observation_accumulation},
      {"decay_properties", decay_properties},
      {"mlp_gradient_check", gradient_check},
      {"tabular_matches_value_iteration", tabular_oracle},
      {"dqn_beats_random", dqn_vs_random},
      {"score_model_beats_mean_baseline", score_model},
      {"multimodel_singleton_equivalence", multimodel_singleton},
      {"multimodel_monotone_invariance", multimodel_monotone},
      {"multimodel_forced_predictor", multimodel_forced},
      {"hierarchy_partition_sizes", hierarchy_partition},
      {"hierarchy_subgoal_persistence", hierarchy_persistence},
      {"hierarchy_agent_20_units", hierarchy_agent},
      {"server_matches_run_episode", server_equivalence},
  };
  const std::set<std::string> only(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && !only.contains(name)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.ok ? "PASS " : "FAIL ") << name << ": " << o.detail << " [" << std::fixed
              << std::setprecision(1) << secs << "s]" << std::defaultfloat << std::setprecision(6) << std::endl;
    failures += !o.ok;
  }
  return failures == 0 ? 0 : 1;
}

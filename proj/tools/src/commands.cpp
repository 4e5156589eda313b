#include "hexwar_tools/commands.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "hexwar/dqn.hpp"
#include "hexwar/hierarchy.hpp"
#include "hexwar/model_io.hpp"
#include "hexwar/policy_factory.hpp"
#include "hexwar/score_model.hpp"
#include "hexwar_tools/server.hpp"

namespace hexwar::tools {

namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const RunManifest& m) {
  json j{{"command", m.command},
         {"scenario", m.scenario.string()},
         {"blue", m.blue},
         {"red", m.red},
         {"seed", m.seed}};
  if (!m.policies.empty()) j["policies"] = m.policies;
  if (m.episodes) j["episodes"] = *m.episodes;
  if (!m.out.empty()) j["out"] = m.out.string();
  if (!m.config.empty()) j["config"] = m.config.string();
  if (m.command == "serve") j["port"] = m.port;
  if (m.deterministic_combat) j["deterministic_combat"] = *m.deterministic_combat;
  return j;
}

namespace {

json load_config(const RunManifest& m) {
  if (m.config.empty()) return json::object();
  try {
    json j = read_json_file(m.config);
    if (!j.is_object()) throw ConfigError(m.config.string() + ": config must be an object");
    return j;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("config " + m.config.string() + ": " + e.what());
  }
}

void check_policy(const std::string& spec, Faction f) {
  try {
    make_policy(spec, f);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

int episodes_or(const RunManifest& m, int fallback) { return m.episodes.value_or(fallback); }

void ensure_out(const RunManifest& m) {
  if (!m.out.empty()) fs::create_directories(m.out);
}

}  // namespace

Scenario resolve_scenario(const RunManifest& m) {
  if (m.scenario.empty()) throw ConfigError("--scenario is required");
  Scenario sc;
  try {
    sc = load_scenario_file(m.scenario);
  } catch (const std::exception& e) {
    throw ConfigError("scenario " + m.scenario.string() + ": " + e.what());
  }
  if (m.deterministic_combat) {
    auto board = std::make_shared<Board>(*sc.board);
    board->combat.deterministic = *m.deterministic_combat;
    sc.board = std::move(board);
  }
  return sc;
}

void validate_manifest(const RunManifest& m) {
  resolve_scenario(m);
  const json cfg = load_config(m);
  if (m.episodes && *m.episodes < 0) throw ConfigError("--episodes must be non-negative");
  if (m.command == "simulate") {
    if (episodes_or(m, 1) < 1) throw ConfigError("simulate needs at least one episode");
    check_policy(m.blue, Faction::blue);
    check_policy(m.red, Faction::red);
  } else if (m.command == "eval") {
    if (m.policies.size() < 2) throw ConfigError("eval needs at least two policy specs");
    if (episodes_or(m, 1) < 1) throw ConfigError("eval needs at least one episode per pair");
    for (const auto& p : m.policies) {
      check_policy(p, Faction::blue);
      check_policy(p, Faction::red);
    }
  } else if (m.command == "train") {
    if (m.out.empty()) throw ConfigError("train needs --out");
    const std::string mode = cfg.value("mode", "dqn");
    if (mode == "dqn" || mode == "manager") {
      check_policy(cfg.value("adversary", m.red), Faction::red);
      try {
        train_config_from_json(cfg).validate();
      } catch (const std::exception& e) {
        throw ConfigError(std::string("train config: ") + e.what());
      }
    } else if (mode == "score") {
      if (cfg.contains("logs")) {
        const fs::path logs = cfg["logs"].get<std::string>();
        if (!fs::exists(logs)) throw ConfigError("score logs not found: " + logs.string());
      } else {
        check_policy(cfg.value("behavior", m.blue), Faction::blue);
        check_policy(cfg.value("adversary", m.red), Faction::red);
      }
    } else {
      throw ConfigError("unknown train mode '" + mode + "'");
    }
  } else if (m.command == "serve") {
    check_policy(m.red, Faction::red);
  } else {
    throw ConfigError("unknown command '" + m.command + "'");
  }
}

ScoreStats score_stats(const std::vector<double>& xs) {
  ScoreStats s;
  s.n = static_cast<int>(xs.size());
  if (xs.empty()) {
    s.degenerate = true;
    return s;
  }
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / s.n;
  if (s.n < 2) {
    s.degenerate = true;
    s.ci_low = s.ci_high = s.mean;
    return s;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(ss / (s.n - 1));
  const double half = 1.959963984540054 * s.stddev / std::sqrt(static_cast<double>(s.n));
  s.ci_low = s.mean - half;
  s.ci_high = s.mean + half;
  return s;
}

namespace {

json stats_json(const ScoreStats& s) {
  json j{{"n", s.n}, {"mean", s.mean}, {"stddev", s.stddev}};
  j["ci95"] = {s.ci_low, s.ci_high};
  if (s.degenerate) j["degenerate"] = true;
  return j;
}

std::vector<int> play_series(const Scenario& sc, const std::string& blue_spec,
                             const std::string& red_spec, std::uint64_t seed, int n,
                             const json& meta, std::ostream* log_out) {
  auto blue = make_policy(blue_spec, Faction::blue);
  auto red = make_policy(red_spec, Faction::red);
  std::vector<int> scores;
  scores.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    EpisodeLog log = run_episode(sc, *blue, *red, seed + static_cast<std::uint64_t>(i));
    log.meta = meta;
    scores.push_back(log.final_score);
    if (log_out) write_log(*log_out, log);
  }
  return scores;
}

void write_curve(const fs::path& path, const std::string& header, const std::vector<double>& ys,
                 int stride) {
  std::ofstream out(path);
  out << header << "\n" << std::setprecision(17);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    out << (static_cast<long long>(i) + 1) * stride << "," << ys[i] << "\n";
  }
}

}  // namespace

json to_json(const SimulateSummary& s) {
  json j = stats_json(s.stats);
  j["wins"] = s.wins;
  j["draws"] = s.draws;
  j["losses"] = s.losses;
  return j;
}

SimulateSummary cmd_simulate(const RunManifest& m, std::ostream& report) {
  validate_manifest(m);
  const Scenario sc = resolve_scenario(m);
  const int n = episodes_or(m, 1);
  const json header = to_json(m);

  ensure_out(m);
  std::ofstream logs;
  if (!m.out.empty()) logs.open(m.out / "episodes.ndjson");

  SimulateSummary summary;
  summary.scores = play_series(sc, m.blue, m.red, m.seed, n, header, logs.is_open() ? &logs : nullptr);
  std::vector<double> xs;
  for (int s : summary.scores) {
    xs.push_back(s);
    if (s > 0) ++summary.wins;
    else if (s == 0) ++summary.draws;
    else ++summary.losses;
  }
  summary.stats = score_stats(xs);

  const json doc{{"manifest", header}, {"summary", to_json(summary)}};
  if (!m.out.empty()) std::ofstream(m.out / "summary.json") << doc.dump(2) << "\n";
  report << doc.dump(2) << "\n";
  return summary;
}

std::vector<fs::path> cmd_train(const RunManifest& m, std::ostream& report) {
  validate_manifest(m);
  const Scenario sc = resolve_scenario(m);
  const json cfg = load_config(m);
  const json header = to_json(m);
  const std::string mode = cfg.value("mode", "dqn");
  ensure_out(m);
  std::vector<fs::path> written;

  auto stamp = [&](json doc) {
    doc["manifest"] = header;
    doc["config"] = cfg;
    return doc;
  };

  if (mode == "dqn" || mode == "manager") {
    TrainConfig tc = train_config_from_json(cfg);
    tc.seed = m.seed;
    if (m.episodes) tc.episodes = *m.episodes;
    auto adversary = make_policy(cfg.value("adversary", m.red), Faction::red);
    std::vector<double> curve;
    fs::path model_path;
    if (mode == "dqn") {
      DqnResult r = train_dqn(sc, *adversary, tc);
      model_path = m.out / "model.json";
      write_json_file(model_path, stamp(model_to_json(r.model)));
      curve = std::move(r.curve);
    } else {
      ManagerTrainConfig mc;
      mc.q = tc;
      mc.horizon = cfg.value("horizon", mc.horizon);
      mc.grid = cfg.value("grid", mc.grid);
      ManagerTrainResult r = train_manager_options(sc, goal_seek_policy, *adversary, mc);
      model_path = m.out / "manager.json";
      write_json_file(model_path, stamp(model_to_json(r.model)));
      curve = std::move(r.curve);
    }
    const fs::path curve_path = m.out / "curve.csv";
    write_curve(curve_path, "episode_window,mean_score", curve, 100);
    written = {model_path, curve_path};
    report << json{{"manifest", header}, {"mode", mode}, {"episodes", tc.episodes},
                   {"windows", curve.size()}, {"model", model_path.string()}}
                  .dump(2)
           << "\n";
    return written;
  }

  // mode == "score"
  ScoreTrainConfig sc_cfg = score_train_config_from_json(cfg);
  sc_cfg.seed = m.seed;
  if (sc_cfg.behavior.empty()) sc_cfg.behavior = m.blue;
  if (sc_cfg.adversary.empty()) sc_cfg.adversary = m.red;
  std::vector<EpisodeLog> logs;
  if (cfg.contains("logs")) {
    std::ifstream in(cfg["logs"].get<std::string>());
    logs = read_logs(in);
  } else {
    auto blue = make_policy(sc_cfg.behavior, Faction::blue);
    auto red = make_policy(sc_cfg.adversary, Faction::red);
    const int n = episodes_or(m, static_cast<int>(sc_cfg.min_episodes));
    for (int i = 0; i < n; ++i) {
      logs.push_back(run_episode(sc, *blue, *red, m.seed + static_cast<std::uint64_t>(i)));
    }
  }
  ScoreTrainResult r;
  try {
    r = train_score_model(sc, logs, sc_cfg);
  } catch (const InsufficientData& e) {
    throw ConfigError(e.what());
  }
  const fs::path model_path = m.out / "score_model.json";
  write_json_file(model_path, stamp(model_to_json(r.predictor)));
  const fs::path curve_path = m.out / "mse.csv";
  write_curve(curve_path, "epoch,heldout_mse", r.mse_curve, 1);
  report << json{{"manifest", header},
                 {"mode", mode},
                 {"episodes", logs.size()},
                 {"heldout_mse", r.heldout_mse},
                 {"baseline_mse", r.baseline_mse},
                 {"model", model_path.string()}}
                .dump(2)
         << "\n";
  return {model_path, curve_path};
}

json to_json(const EvalTable& t) {
  json j{{"ordered", json::array()}, {"seat_averaged", json::array()}};
  for (const auto& r : t.ordered) {
    json row = stats_json(r.stats);
    row["blue"] = r.blue;
    row["red"] = r.red;
    j["ordered"].push_back(row);
  }
  for (const auto& r : t.seat_averaged) {
    json row = stats_json(r.stats);
    row["a"] = r.blue;
    row["b"] = r.red;
    j["seat_averaged"].push_back(row);
  }
  return j;
}

EvalTable cmd_eval(const RunManifest& m, std::ostream& report) {
  validate_manifest(m);
  const Scenario sc = resolve_scenario(m);
  const int n = episodes_or(m, 1);
  const json header = to_json(m);
  const std::size_t k = m.policies.size();

  // scores[i][j]: entrant i as blue against entrant j as red.
  std::vector<std::vector<std::vector<int>>> scores(k, std::vector<std::vector<int>>(k));
  EvalTable table;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      scores[i][j] = play_series(sc, m.policies[i], m.policies[j], m.seed, n, header, nullptr);
      table.ordered.push_back({m.policies[i], m.policies[j],
                               score_stats(std::vector<double>(scores[i][j].begin(), scores[i][j].end()))});
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      // Entrant i's perspective: its blue scores, negated scores while red.
      std::vector<double> pooled(scores[i][j].begin(), scores[i][j].end());
      for (int s : scores[j][i]) pooled.push_back(-s);
      table.seat_averaged.push_back({m.policies[i], m.policies[j], score_stats(pooled)});
    }
  }

  const json doc{{"manifest", header}, {"table", to_json(table)}};
  if (!m.out.empty()) {
    ensure_out(m);
    std::ofstream(m.out / "eval.json") << doc.dump(2) << "\n";
  }
  report << std::left << std::setw(24) << "blue" << std::setw(24) << "red" << std::right
         << std::setw(6) << "n" << std::setw(12) << "mean" << std::setw(26) << "95% CI" << "\n";
  for (const auto& r : table.ordered) {
    std::ostringstream ci;
    ci << std::fixed << std::setprecision(3) << "[" << r.stats.ci_low << ", " << r.stats.ci_high
       << "]";
    report << std::left << std::setw(24) << r.blue << std::setw(24) << r.red << std::right
           << std::setw(6) << r.stats.n << std::setw(12) << std::fixed << std::setprecision(3)
           << r.stats.mean << std::setw(26) << ci.str()
           << (r.stats.degenerate ? "  (degenerate: n<2)" : "") << "\n";
  }
  report << "seat-averaged:\n";
  for (const auto& r : table.seat_averaged) {
    report << "  " << r.blue << " vs " << r.red << ": mean " << r.stats.mean << " CI ["
           << r.stats.ci_low << ", " << r.stats.ci_high << "]"
           << (r.stats.degenerate ? " (degenerate)" : "") << "\n";
  }
  return table;
}

namespace {
std::atomic<bool> g_stop{false};
extern "C" void on_signal(int) { g_stop = true; }
}  // namespace

int cmd_serve(const RunManifest& m, std::ostream& report) {
  validate_manifest(m);
  ServerConfig cfg;
  cfg.scenario = resolve_scenario(m);
  cfg.red_policy = m.red;
  cfg.seed = m.seed;
  cfg.port = m.port;
  cfg.log_dir = m.out;
  PlayServer server(std::move(cfg));
  server.start();
  report << json{{"manifest", to_json(m)}, {"listening", server.port()}}.dump() << std::endl;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"hexwar: hex-grid combat simulator and learning toolkit"};
  app.require_subcommand(1);

  RunManifest m;
  std::string seed_text = "0";
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", m.scenario, "scenario JSON file")->required();
    sub->add_option("--seed", m.seed, "base seed");
    sub->add_option("--out", m.out, "output directory");
    sub->add_option("--config", m.config, "JSON config file");
    sub->add_flag("--deterministic-combat{true}", m.deterministic_combat,
                  "override the scenario's combat mode (=false for stochastic)");
  };

  auto* sim = app.add_subcommand("simulate", "run episodes and summarize final scores");
  add_common(sim);
  sim->add_option("--blue", m.blue, "blue policy spec");
  sim->add_option("--red", m.red, "red policy spec");
  sim->add_option("--episodes", m.episodes, "episode count");

  auto* train = app.add_subcommand("train", "train a model (mode set in --config)");
  add_common(train);
  train->add_option("--blue", m.blue, "behavior spec for score-model data");
  train->add_option("--red", m.red, "adversary spec");
  train->add_option("--episodes", m.episodes, "training episodes");

  auto* eval = app.add_subcommand("eval", "round-robin comparison");
  add_common(eval);
  std::vector<std::string> blues, reds;
  eval->add_option("--policy", m.policies, "entrant (repeatable)");
  eval->add_option("--blue", blues, "entrant (repeatable)");
  eval->add_option("--red", reds, "entrant (repeatable)");
  eval->add_option("--episodes", m.episodes, "episodes per ordered pair");

  auto* serve = app.add_subcommand("serve", "play server for a human blue player");
  add_common(serve);
  serve->add_option("--red", m.red, "AI policy spec for red");
  serve->add_option("--port", m.port, "listen port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  m.command = app.get_subcommands().front()->get_name();
  m.policies.insert(m.policies.end(), blues.begin(), blues.end());
  m.policies.insert(m.policies.end(), reds.begin(), reds.end());

  try {
    if (m.command == "simulate") cmd_simulate(m, out);
    else if (m.command == "train") cmd_train(m, out);
    else if (m.command == "eval") cmd_eval(m, out);
    else return cmd_serve(m, out);
  } catch (const ConfigError& e) {
    err << "hexwar: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "hexwar: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace hexwar::tools

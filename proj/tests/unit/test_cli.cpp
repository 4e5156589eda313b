#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "hexwar/dqn.hpp"
#include "hexwar/episode.hpp"
#include "hexwar/model_io.hpp"
#include "hexwar/policy_factory.hpp"
#include "hexwar_tools/commands.hpp"

using namespace hexwar;
using namespace hexwar::testing;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hexwar");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = tools::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / name) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  std::string str(const std::string& child = {}) const { return (child.empty() ? path_ : path_ / child).string(); }

 private:
  fs::path path_;
};

std::string scen(const char* name) { return scenario_path(name).string(); }

}  // namespace

TEST(ScoreStats, MeanDeviationAndInterval) {
  const auto s = tools::score_stats({1, 2, 3, 4});
  EXPECT_EQ(s.n, 4);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.stddev, std::sqrt(5.0 / 3.0), 1e-12);
  EXPECT_NEAR(s.ci_high - s.mean, 1.959963984540054 * s.stddev / 2.0, 1e-12);
  EXPECT_NEAR(s.mean - s.ci_low, s.ci_high - s.mean, 1e-12);
  const auto one = tools::score_stats({7});
  EXPECT_TRUE(one.degenerate);
  EXPECT_EQ(one.stddev, 0.0);
  EXPECT_TRUE(tools::score_stats({}).degenerate);
}

TEST(Simulate, PassVersusPassIsAllZero) {
  TempDir d("hexwar_cli_sim0");
  const auto r = cli({"simulate", "--scenario", scen("duel3.json"), "--episodes", "5", "--out", d.str()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json summary = json::parse(slurp(d.path() / "summary.json"));
  EXPECT_EQ(summary["summary"]["mean"], 0.0);
  EXPECT_EQ(summary["summary"]["stddev"], 0.0);
  EXPECT_EQ(summary["summary"]["draws"], 5);
  EXPECT_EQ(summary["manifest"]["command"], "simulate");
  EXPECT_EQ(json::parse(r.out), summary);
  std::ifstream in(d.path() / "episodes.ndjson");
  const auto logs = read_logs(in);
  ASSERT_EQ(logs.size(), 5u);
  for (std::size_t i = 0; i < logs.size(); ++i) {
    EXPECT_EQ(logs[i].seed, i);
    EXPECT_EQ(logs[i].meta["command"], "simulate");
    replay(scenario_file("duel3.json"), logs[i], nullptr);
  }
}

TEST(Simulate, SameArgumentsSameBytes) {
  TempDir d("hexwar_cli_sim_twice");
  std::string first;
  for (int run = 0; run < 2; ++run) {
    ASSERT_EQ(cli({"simulate", "--scenario", scen("mirror6.json"), "--blue", "random", "--red", "greedy",
                   "--episodes", "10", "--seed", "42", "--out", d.str()})
                  .code,
              0);
    if (run == 0) first = slurp(d.path() / "episodes.ndjson");
  }
  EXPECT_FALSE(first.empty());
  EXPECT_EQ(slurp(d.path() / "episodes.ndjson"), first);
}

TEST(Simulate, GreedyBeatsPassInTheDuel) {
  std::ostringstream report;
  tools::RunManifest m;
  m.command = "simulate";
  m.scenario = scenario_path("duel3.json");
  m.blue = "greedy";
  m.red = "pass";
  m.episodes = 20;
  const auto s = tools::cmd_simulate(m, report);
  EXPECT_GT(s.stats.mean, 0.0);
  EXPECT_EQ(s.wins + s.draws + s.losses, 20);
}

TEST(Simulate, CombatOverride) {
  tools::RunManifest m;
  m.scenario = scenario_path("mirror6.json");
  EXPECT_FALSE(tools::resolve_scenario(m).board->combat.deterministic);
  m.deterministic_combat = true;
  EXPECT_TRUE(tools::resolve_scenario(m).board->combat.deterministic);
  const auto r = cli({"simulate", "--scenario", scen("mirror6.json"), "--deterministic-combat", "--episodes", "1"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["manifest"]["deterministic_combat"], true);
}

TEST(Train, ZeroEpisodesGivesLoadableUntrainedModel) {
  TempDir d("hexwar_cli_train0");
  std::ofstream(d.path() / "cfg.json") << R"({"mode":"dqn","hidden":[16]})";
  const auto r = cli({"train", "--scenario", scen("skirmish5.json"), "--config", d.str("cfg.json"), "--episodes", "0",
                      "--seed", "5", "--out", d.str()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(slurp(d.path() / "model.json"));
  EXPECT_EQ(doc["manifest"]["seed"], 5);
  EXPECT_EQ(doc["config"]["hidden"], json::array({16}));
  EXPECT_EQ(slurp(d.path() / "curve.csv"), "episode_window,mean_score\n");
  auto policy = make_policy(d.str("model.json"), Faction::blue);
  const auto log = run_episode(scenario_file("skirmish5.json"), *policy, *make_policy("pass", Faction::red), 0);
  EXPECT_FALSE(log.records.empty());
}

TEST(Train, CurveHasOneRowPerHundredEpisodes) {
  TempDir d("hexwar_cli_train");
  std::ofstream(d.path() / "cfg.json") << R"({"mode":"dqn","hidden":[8],"batch_size":8,"train_every":4})";
  ASSERT_EQ(cli({"train", "--scenario", scen("duel3.json"), "--config", d.str("cfg.json"), "--episodes", "200",
                 "--out", d.str()})
                .code,
            0);
  std::istringstream in(slurp(d.path() / "curve.csv"));
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[1].substr(0, 4), "100,");
  EXPECT_EQ(lines[2].substr(0, 4), "200,");
}

TEST(Train, ScoreModeWritesPredictorAndMseCurve) {
  TempDir d("hexwar_cli_score");
  std::ofstream(d.path() / "cfg.json") << R"({"mode":"score","behavior":"random","adversary":"greedy","epochs":3,"hidden":[8]})";
  const auto r = cli({"train", "--scenario", scen("mirror6.json"), "--config", d.str("cfg.json"), "--out", d.str()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(slurp(d.path() / "score_model.json"));
  EXPECT_EQ(doc["kind"], "score");
  EXPECT_EQ(slurp(d.path() / "mse.csv").substr(0, 17), "epoch,heldout_mse");
}

TEST(Train, ScoreModeWithTooFewEpisodesIsAConfigError) {
  TempDir d("hexwar_cli_score_few");
  std::ofstream(d.path() / "cfg.json") << R"({"mode":"score","epochs":1})";
  const auto r = cli({"train", "--scenario", scen("mirror6.json"), "--config", d.str("cfg.json"), "--episodes", "10",
                      "--out", d.str()});
  EXPECT_EQ(r.code, tools::kExitConfig);
}

TEST(Eval, OrderedRowsAndSeatAveraging) {
  TempDir d("hexwar_cli_eval");
  const auto r = cli({"eval", "--scenario", scen("mirror6.json"), "--policy", "random", "--policy", "greedy",
                      "--policy", "pass", "--episodes", "20", "--out", d.str()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json t = json::parse(slurp(d.path() / "eval.json"))["table"];
  ASSERT_EQ(t["ordered"].size(), 6u);
  ASSERT_EQ(t["seat_averaged"].size(), 3u);
  for (const auto& row : t["ordered"]) {
    EXPECT_EQ(row["n"], 20);
    EXPECT_LE(row["ci95"][0].get<double>(), row["mean"].get<double>());
    EXPECT_GE(row["ci95"][1].get<double>(), row["mean"].get<double>());
  }
  EXPECT_NE(r.out.find("95% CI"), std::string::npos);
}

TEST(Eval, MirrorSelfPlayIntervalsContainZero) {
  tools::RunManifest m;
  m.command = "eval";
  m.scenario = scenario_path("mirror6.json");
  m.policies = {"random", "random"};
  m.episodes = 200;
  std::ostringstream report;
  const auto t = tools::cmd_eval(m, report);
  ASSERT_EQ(t.ordered.size(), 2u);
  for (const auto& row : t.ordered) {
    EXPECT_LE(row.stats.ci_low, 0.0);
    EXPECT_GE(row.stats.ci_high, 0.0);
  }
}

TEST(Eval, SingleEpisodeIsFlaggedDegenerate) {
  const auto r = cli({"eval", "--scenario", scen("duel3.json"), "--blue", "greedy", "--red", "pass", "--episodes", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("degenerate"), std::string::npos);
}

TEST(ExitCodes, BadReferencesAreConfigErrors) {
  EXPECT_EQ(cli({"simulate", "--scenario", "/nonexistent.json"}).code, tools::kExitConfig);
  EXPECT_EQ(cli({"simulate", "--scenario", scen("duel3.json"), "--blue", "wizard"}).code, tools::kExitConfig);
  EXPECT_EQ(cli({"simulate", "--scenario", scen("duel3.json"), "--red", "/missing/model.json"}).code,
            tools::kExitConfig);
  EXPECT_EQ(cli({"train", "--scenario", scen("duel3.json"), "--config", "/missing.json"}).code, tools::kExitConfig);
  EXPECT_EQ(cli({"eval", "--scenario", scen("duel3.json"), "--policy", "pass"}).code, tools::kExitConfig);
  EXPECT_EQ(cli({"bogus"}).code, tools::kExitConfig);
  EXPECT_EQ(cli({"simulate"}).code, tools::kExitConfig);
  TempDir d("hexwar_cli_badcfg");
  std::ofstream(d.path() / "cfg.json") << R"({"mode":"dqn","gamma":2})";
  EXPECT_EQ(cli({"train", "--scenario", scen("duel3.json"), "--config", d.str("cfg.json")}).code, tools::kExitConfig);
}

TEST(ExitCodes, HelpIsSuccess) { EXPECT_EQ(cli({"--help"}).code, 0); }

#include "hexwar/episode.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace hexwar {

using nlohmann::json;

EpisodeLog run_episode(const Scenario& sc, Policy& blue, Policy& red, std::uint64_t seed) {
  EpisodeLog log;
  log.scenario = sc.name();
  log.seed = seed;
  log.blue = blue.name();
  log.red = red.name();

  blue.reset(policy_seed(seed, Faction::blue));
  red.reset(policy_seed(seed, Faction::red));

  GameState s = initial_state(sc, seed);
  while (const auto unit = unit_on_move(s)) {
    Policy& side = s.phase == Faction::blue ? blue : red;
    StepRecord rec;
    rec.turn = s.turn;
    rec.unit = *unit;
    rec.faction = s.phase;
    rec.state = snapshot(s);
    rec.action = side.act(s, *unit);
    rec.trace = side.last_trace();
    if (!is_legal(s, *unit, rec.action)) {
      throw EpisodeAborted("policy '" + side.name() + "' chose illegal action " +
                           to_string(rec.action) + " for unit " + std::to_string(*unit) +
                           " at turn " + std::to_string(s.turn));
    }
    rec.reward = step(s, *unit, rec.action).reward;
    log.records.push_back(std::move(rec));
  }
  log.final_score = s.score;
  return log;
}

void replay(const Scenario& sc, const EpisodeLog& log,
            const std::function<void(const GameState&, const StepRecord&)>& visit) {
  GameState s = initial_state(sc, log.seed);
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const StepRecord& rec = log.records[i];
    const auto unit = unit_on_move(s);
    if (!unit || *unit != rec.unit) {
      throw ReplayMismatch("record " + std::to_string(i) + ": unit on move differs");
    }
    if (snapshot(s) != rec.state) {
      throw ReplayMismatch("record " + std::to_string(i) + ": snapshot differs");
    }
    if (visit) visit(s, rec);
    StepResult r;
    try {
      r = step(s, rec.unit, rec.action);
    } catch (const IllegalAction& e) {
      throw ReplayMismatch("record " + std::to_string(i) + ": " + e.what());
    }
    if (r.reward != rec.reward) {
      throw ReplayMismatch("record " + std::to_string(i) + ": reward differs");
    }
  }
  if (!log.truncated) {
    if (unit_on_move(s)) throw ReplayMismatch("log ends before a terminal state");
    if (s.score != log.final_score) throw ReplayMismatch("final score differs");
  }
}

void write_log(std::ostream& out, const EpisodeLog& log) {
  json header = {{"type", "header"}, {"scenario", log.scenario}, {"seed", log.seed},
                 {"blue", log.blue},  {"red", log.red}};
  if (!log.meta.is_null()) header["meta"] = log.meta;
  out << header.dump() << '\n';
  for (const auto& rec : log.records) {
    json line = {{"type", "step"},
                 {"turn", rec.turn},
                 {"unit", rec.unit},
                 {"faction", to_string(rec.faction)},
                 {"state", rec.state},
                 {"action", action_to_json(rec.action)},
                 {"reward", rec.reward}};
    if (!rec.trace.is_null()) line["trace"] = rec.trace;
    out << line.dump() << '\n';
  }
  json tail = {{"type", "final"}, {"final_score", log.final_score}};
  if (log.truncated) tail["truncated"] = true;
  out << tail.dump() << '\n';
}

std::string to_ndjson(const EpisodeLog& log) {
  std::ostringstream out;
  write_log(out, log);
  return out.str();
}

std::vector<EpisodeLog> read_logs(std::istream& in) {
  std::vector<EpisodeLog> logs;
  EpisodeLog* current = nullptr;
  bool closed = true;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error("episode log line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(e.what());
    }
    const auto type = j.value("type", std::string{});
    if (type == "header") {
      if (!closed) fail("header before previous episode's final record");
      logs.emplace_back();
      current = &logs.back();
      current->scenario = j.at("scenario").get<std::string>();
      current->seed = j.at("seed").get<std::uint64_t>();
      current->blue = j.value("blue", std::string{});
      current->red = j.value("red", std::string{});
      if (j.contains("meta")) current->meta = j["meta"];
      closed = false;
    } else if (type == "step") {
      if (current == nullptr || closed) fail("step record outside an episode");
      StepRecord rec;
      rec.turn = j.at("turn").get<int>();
      rec.unit = j.at("unit").get<int>();
      const auto f = faction_from_string(j.at("faction").get<std::string>());
      if (!f) fail("bad faction");
      rec.faction = *f;
      rec.state = j.at("state");
      rec.action = action_from_json(j.at("action"));
      rec.reward = j.at("reward").get<int>();
      if (j.contains("trace")) rec.trace = j["trace"];
      current->records.push_back(std::move(rec));
    } else if (type == "final") {
      if (current == nullptr || closed) fail("final record outside an episode");
      current->final_score = j.at("final_score").get<int>();
      current->truncated = j.value("truncated", false);
      closed = true;
    } else {
      fail("unknown record type '" + type + "'");
    }
  }
  if (!closed) throw std::runtime_error("episode log ends without a final record");
  return logs;
}

}  // namespace hexwar

#include "hexwar/session.hpp"

#include <cstdio>

namespace hexwar {

using nlohmann::json;

std::string terrain_digest(const Board& b) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int r = 0; r < b.height; ++r) {
    for (int q = 0; q < b.width; ++q) {
      h ^= static_cast<unsigned char>(terrain_char(b.terrain_at({q, r})));
      h *= 0x100000001b3ULL;
    }
    h ^= static_cast<unsigned char>('/');
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json hello_message(const Scenario& sc) {
  return {{"type", "hello"}, {"v", kProtocolVersion}, {"scenario", scenario_to_json(sc)}};
}

json state_message(const GameState& s) {
  json objectives = json::array();
  for (const auto& o : s.board->objectives) {
    objectives.push_back({{"q", o.pos.q}, {"r", o.pos.r}, {"value", o.value}});
  }
  json snap = snapshot(s);
  return {{"type", "state"},
          {"turn", s.turn},
          {"phase", to_string(s.phase)},
          {"score", s.score},
          {"units", snap["units"]},
          {"objectives", objectives},
          {"terrain_digest", terrain_digest(*s.board)}};
}

json prompt_message(const GameState& s, UnitId unit) {
  json legal = json::array();
  for (Action a : legal_actions(s, unit)) legal.push_back(action_to_json(a));
  return {{"type", "prompt"}, {"unit", unit}, {"legal", legal}};
}

json error_message(std::string_view code, std::string_view msg) {
  return {{"type", "error"}, {"code", code}, {"msg", msg}};
}

json gameover_message(int final_score) {
  return {{"type", "gameover"}, {"final_score", final_score}};
}

PlaySession::PlaySession(Scenario sc, PolicyPtr red, std::uint64_t seed)
    : scenario_(std::move(sc)), red_(std::move(red)), state_(initial_state(scenario_, seed)) {
  if (!red_) throw std::invalid_argument("PlaySession needs a red policy");
  log_.scenario = scenario_.name();
  log_.seed = seed;
  log_.blue = "human";
  log_.red = red_->name();
  red_->reset(policy_seed(seed, Faction::red));
}

std::vector<json> PlaySession::start() {
  if (started_) return {error_message("protocol", "session already started")};
  started_ = true;
  std::vector<json> out{hello_message(scenario_)};
  auto rest = advance();
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

json PlaySession::apply(UnitId unit, Action a, json trace) {
  StepRecord rec;
  rec.turn = state_.turn;
  rec.unit = unit;
  rec.faction = state_.phase;
  rec.state = snapshot(state_);
  rec.action = a;
  rec.trace = std::move(trace);
  const StepResult r = step(state_, unit, a);
  rec.reward = r.reward;
  json events = json::array();
  for (const auto& e : r.events) events.push_back(event_to_json(e));
  json msg = {{"type", "result"},   {"unit", unit},       {"faction", to_string(rec.faction)},
              {"action", action_to_json(a)}, {"events", events}, {"reward", r.reward},
              {"score", state_.score}};
  if (!rec.trace.is_null()) msg["trace"] = rec.trace;
  log_.records.push_back(std::move(rec));
  return msg;
}

std::vector<json> PlaySession::advance() {
  std::vector<json> out;
  prompt_.reset();
  while (const auto unit = unit_on_move(state_)) {
    if (state_.phase == Faction::blue) {
      prompt_ = *unit;
      out.push_back(state_message(state_));
      out.push_back(prompt_message(state_, *unit));
      return out;
    }
    const Action a = red_->act(state_, *unit);
    if (!is_legal(state_, *unit, a)) {
      throw EpisodeAborted("red policy '" + red_->name() + "' chose illegal action " + to_string(a));
    }
    out.push_back(apply(*unit, a, red_->last_trace()));
  }
  finished_ = true;
  log_.final_score = state_.score;
  out.push_back(state_message(state_));
  out.push_back(gameover_message(state_.score));
  return out;
}

void PlaySession::reprompt(std::vector<json>& out) const {
  if (prompt_) out.push_back(prompt_message(state_, *prompt_));
}

std::vector<json> PlaySession::handle(std::string_view line) {
  std::vector<json> out;
  if (!started_) return {error_message("protocol", "session not started")};
  if (finished_) return {error_message("game_over", "the game has ended")};

  json msg;
  try {
    msg = json::parse(line);
  } catch (const json::parse_error&) {
    out.push_back(error_message("malformed", "message is not valid JSON"));
    reprompt(out);
    return out;
  }
  if (!msg.is_object() || msg.value("type", std::string{}) != "act" || !msg.contains("unit") ||
      !msg["unit"].is_number_integer() || !msg.contains("action")) {
    out.push_back(error_message("malformed", "expected act{unit, action{kind, dir?}}"));
    reprompt(out);
    return out;
  }
  Action a;
  try {
    a = action_from_json(msg["action"]);
  } catch (const std::invalid_argument& e) {
    out.push_back(error_message("malformed", e.what()));
    reprompt(out);
    return out;
  }
  const UnitId unit = msg["unit"].get<int>();
  if (!prompt_ || unit != *prompt_) {
    out.push_back(error_message("not_on_move", "not on move"));
    reprompt(out);
    return out;
  }
  if (!is_legal(state_, unit, a)) {
    out.push_back(error_message("illegal_action", "illegal action " + to_string(a)));
    reprompt(out);
    return out;
  }
  out.push_back(apply(unit, a, nullptr));
  auto rest = advance();
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

void PlaySession::disconnect() {
  if (finished_) return;
  finished_ = true;
  prompt_.reset();
  log_.truncated = true;
  log_.final_score = state_.score;
}

}  // namespace hexwar

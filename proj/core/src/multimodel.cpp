#include "hexwar/multimodel.hpp"

#include <cmath>
#include <map>

namespace hexwar {

std::size_t select_best(std::span<const double> scores, Faction controlled) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    const bool better = controlled == Faction::blue ? scores[i] > scores[best]
                                                    : scores[i] < scores[best];
    if (better) best = i;
  }
  return best;
}

MultiModel::MultiModel(Faction controlled, std::vector<RepositoryEntry> repository,
                       EvaluationRule rule)
    : faction_(controlled), repo_(std::move(repository)), rule_(std::move(rule)) {
  if (repo_.empty()) throw std::invalid_argument("MultiModel needs at least one behavior model");
  for (const auto& e : repo_) {
    if (!e.behavior) throw std::invalid_argument("MultiModel: null behavior model");
  }
}

std::string MultiModel::name() const {
  std::string n = "multimodel(";
  for (std::size_t i = 0; i < repo_.size(); ++i) {
    if (i > 0) n += ',';
    n += repo_[i].behavior->name();
  }
  return n + ")";
}

void MultiModel::reset(std::uint64_t seed) {
  for (auto& e : repo_) e.behavior->reset(seed);
  decisions_.clear();
}

std::vector<double> MultiModel::predict_all(const GameState& s) const {
  std::vector<double> scores;
  scores.reserve(repo_.size());
  // Predictors sharing a grid size share one abstraction.
  std::map<int, GlobalAbstraction> abstractions;
  for (const auto& e : repo_) {
    auto it = abstractions.find(e.predictor.grid);
    if (it == abstractions.end()) {
      it = abstractions.emplace(e.predictor.grid, encode_global(s, e.predictor.grid)).first;
    }
    const double v = e.predictor.predict(it->second);
    if (!std::isfinite(v)) {
      throw ModelFault("score predictor for '" + e.behavior->name() + "' produced a non-finite score");
    }
    scores.push_back(v);
  }
  return scores;
}

std::size_t MultiModel::select(std::span<const double> scores) const {
  if (scores.size() != repo_.size()) {
    throw std::invalid_argument("MultiModel::select: one score per repository entry required");
  }
  const std::size_t i = rule_(scores, faction_);
  if (i >= repo_.size()) throw ModelFault("evaluation rule returned an out-of-range index");
  return i;
}

Action MultiModel::act(const GameState& s, UnitId unit) {
  const Unit* u = s.find(unit);
  if (u == nullptr || u->faction != faction_) {
    throw std::invalid_argument("MultiModel::act: unit " + std::to_string(unit) +
                                " does not belong to the controlled faction");
  }
  DecisionRecord rec;
  rec.turn = s.turn;
  rec.unit = unit;
  rec.scores = predict_all(s);
  rec.selected = select(rec.scores);
  Policy& chosen = *repo_[rec.selected].behavior;
  rec.model = chosen.name();
  const Action a = chosen.act(s, unit);
  if (!is_legal(s, unit, a)) {
    throw ModelFault("behavior model '" + rec.model + "' returned illegal action " + to_string(a));
  }
  decisions_.push_back(std::move(rec));
  return a;
}

nlohmann::json MultiModel::last_trace() const {
  if (decisions_.empty()) return nullptr;
  const auto& d = decisions_.back();
  return {{"scores", d.scores}, {"selected", d.selected}, {"model", d.model}};
}

}  // namespace hexwar

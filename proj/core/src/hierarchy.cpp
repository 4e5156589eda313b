#include "hexwar/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "hexwar/model_io.hpp"

namespace hexwar {

namespace {

double frac_distance(std::pair<double, double> a, std::pair<double, double> b) {
  const double dq = a.first - b.first;
  const double dr = a.second - b.second;
  return (std::abs(dq) + std::abs(dr) + std::abs(dq + dr)) / 2.0;
}

std::pair<double, double> as_pair(HexCoord c) {
  return {static_cast<double>(c.q), static_cast<double>(c.r)};
}

HexCoord round_to_board(double q, double r, int width, int height) {
  const int qi = std::clamp(static_cast<int>(std::lround(q)), 0, std::max(width - 1, 0));
  const int ri = std::clamp(static_cast<int>(std::lround(r)), 0, std::max(height - 1, 0));
  return {qi, ri};
}

std::pair<double, double> group_centroid(const std::vector<HexCoord>& pts) {
  double q = 0.0, r = 0.0;
  for (HexCoord p : pts) {
    q += p.q;
    r += p.r;
  }
  const auto n = static_cast<double>(pts.size());
  return {q / n, r / n};
}

}  // namespace

nlohmann::json to_json(const Assignment& a) {
  return {{"target", {a.target.q, a.target.r}},
          {"posture", to_string(a.posture)},
          {"objective", a.objective}};
}

std::pair<double, double> centroid(const GameState& s, const std::vector<UnitId>& units) {
  std::vector<HexCoord> pts;
  for (UnitId id : units) {
    if (const Unit* u = s.find(id)) pts.push_back(u->pos);
  }
  if (pts.empty()) return {0.0, 0.0};
  return group_centroid(pts);
}

std::vector<ManagerAgent> partition_units(const GameState& s, Faction faction) {
  struct Group {
    std::vector<UnitId> ids;
    std::vector<HexCoord> pts;
  };
  std::vector<Group> groups;
  for (const auto& u : s.units) {  // ascending id
    if (u.faction != faction) continue;
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (static_cast<int>(groups[g].ids.size()) >= kMaxGroup) continue;
      const double d = frac_distance(as_pair(u.pos), group_centroid(groups[g].pts));
      if (d <= kJoinRadius && d < best_d) {
        best = static_cast<int>(g);
        best_d = d;
      }
    }
    if (best < 0) {
      groups.push_back({{u.id}, {u.pos}});
    } else {
      groups[static_cast<std::size_t>(best)].ids.push_back(u.id);
      groups[static_cast<std::size_t>(best)].pts.push_back(u.pos);
    }
  }

  // Fold undersized groups into the nearest group with room for them.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t g = 0; g < groups.size() && !changed; ++g) {
      if (static_cast<int>(groups[g].ids.size()) >= kMinGroup) continue;
      int best = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t h = 0; h < groups.size(); ++h) {
        if (h == g ||
            static_cast<int>(groups[g].ids.size() + groups[h].ids.size()) > kMaxGroup) {
          continue;
        }
        const double d = frac_distance(group_centroid(groups[g].pts), group_centroid(groups[h].pts));
        if (d < best_d) {
          best = static_cast<int>(h);
          best_d = d;
        }
      }
      if (best >= 0) {
        auto& dst = groups[static_cast<std::size_t>(best)];
        dst.ids.insert(dst.ids.end(), groups[g].ids.begin(), groups[g].ids.end());
        dst.pts.insert(dst.pts.end(), groups[g].pts.begin(), groups[g].pts.end());
        groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(g));
        changed = true;
      }
    }
  }

  std::vector<ManagerAgent> out;
  for (auto& g : groups) {
    ManagerAgent m;
    m.id = static_cast<int>(out.size());
    m.units = std::move(g.ids);
    std::sort(m.units.begin(), m.units.end());
    m.remainder = static_cast<int>(m.units.size()) < kMinGroup;
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<RankedObjective> rank_objectives(const CommanderAgent& c, const GlobalAbstraction& g) {
  const int enemy_channel = c.faction == Faction::blue ? 1 : 0;
  const Region full{0, 0, c.width - 1, c.height - 1};
  std::vector<RankedObjective> ranked;
  for (std::size_t i = 0; i < c.objectives.size(); ++i) {
    const int cell = super_cell(full, g.grid, c.objectives[i].pos);
    const int row = cell / g.grid;
    const int col = cell % g.grid;
    double enemy = 0.0;
    int best_d = std::numeric_limits<int>::max();
    for (int rr = 0; rr < g.grid; ++rr) {
      for (int cc = 0; cc < g.grid; ++cc) {
        const double v = g.at(enemy_channel, rr, cc);
        const int d = std::abs(rr - row) + std::abs(cc - col);
        if (v > 0.0 && d < best_d) {
          best_d = d;
          enemy = v;
        }
      }
    }
    ranked.push_back({static_cast<int>(i), c.objectives[i].value - 0.5 * enemy});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedObjective& a, const RankedObjective& b) { return a.score > b.score; });
  return ranked;
}

CommanderDecision commander_decide(const CommanderAgent& c, const GlobalAbstraction& g) {
  CommanderDecision out;
  if (c.managers.empty()) return out;

  if (c.objectives.empty()) {
    const int enemy_channel = c.faction == Faction::blue ? 1 : 0;
    double wq = 0.0, wr = 0.0, total = 0.0;
    for (int row = 0; row < g.grid; ++row) {
      for (int col = 0; col < g.grid; ++col) {
        const double v = g.at(enemy_channel, row, col);
        wq += v * ((col + 0.5) * c.width / g.grid - 0.5);
        wr += v * ((row + 0.5) * c.height / g.grid - 0.5);
        total += v;
      }
    }
    const HexCoord target = total > 0.0
                                ? round_to_board(wq / total, wr / total, c.width, c.height)
                                : round_to_board((c.width - 1) / 2.0, (c.height - 1) / 2.0,
                                                 c.width, c.height);
    for (const auto& [id, pos] : c.managers) out[id] = Assignment{target, Posture::attrit, -1};
    return out;
  }

  const auto ranked = rank_objectives(c, g);
  const std::size_t k = std::min(c.managers.size(), ranked.size());
  std::vector<int> top;
  for (std::size_t i = 0; i < k; ++i) top.push_back(ranked[i].index);

  // Rounds of one-to-one nearest matching until every manager is assigned.
  std::vector<std::pair<int, HexCoord>> pending = c.managers;
  while (!pending.empty()) {
    std::vector<std::tuple<int, int, int, std::size_t>> pairs;  // dist, manager, objective, slot
    for (std::size_t m = 0; m < pending.size(); ++m) {
      for (int o : top) {
        pairs.emplace_back(distance(pending[m].second, c.objectives[static_cast<std::size_t>(o)].pos),
                           pending[m].first, o, m);
      }
    }
    std::sort(pairs.begin(), pairs.end());
    std::vector<bool> obj_used(c.objectives.size(), false);
    std::vector<bool> mgr_done(pending.size(), false);
    for (const auto& [d, mid, o, slot] : pairs) {
      if (obj_used[static_cast<std::size_t>(o)] || mgr_done[slot]) continue;
      obj_used[static_cast<std::size_t>(o)] = true;
      mgr_done[slot] = true;
      out[mid] = Assignment{c.objectives[static_cast<std::size_t>(o)].pos, Posture::seize, o};
    }
    std::vector<std::pair<int, HexCoord>> rest;
    for (std::size_t m = 0; m < pending.size(); ++m) {
      if (!mgr_done[m]) rest.push_back(pending[m]);
    }
    pending = std::move(rest);
  }
  return out;
}

ActiveSubgoal derive_subgoal(const ManagerAgent& mgr, const GameState& s, UnitId unit,
                             const HierarchyConfig& cfg) {
  const Unit* me = s.find(unit);
  if (me == nullptr) throw std::invalid_argument("derive_subgoal: unit is not alive");
  ActiveSubgoal out;
  out.issued_turn = s.turn;
  out.goal.horizon = cfg.horizon;
  if (!mgr.assignment) {
    out.goal = Subgoal{me->pos, Posture::defend, cfg.horizon};
    return out;
  }
  const Assignment& a = *mgr.assignment;
  if (a.posture == Posture::attrit || a.objective < 0) {
    out.goal = Subgoal{a.target, a.posture, cfg.horizon};
    return out;
  }
  const HexCoord obj = a.target;
  const Unit* holder = s.unit_at(obj);
  if (holder == nullptr || holder->faction != me->faction) {
    out.goal = Subgoal{obj, Posture::seize, cfg.horizon};
    return out;
  }
  if (holder->id == unit) {
    out.goal = Subgoal{obj, Posture::defend, cfg.horizon};
    return out;
  }
  // Nearest enemy within reach; ties to the lowest id.
  const Unit* enemy = nullptr;
  int best_d = std::numeric_limits<int>::max();
  for (const auto& u : s.units) {
    if (u.faction == me->faction) continue;
    const int d = distance(me->pos, u.pos);
    if (d <= cfg.attrit_radius && d < best_d) {
      enemy = &u;
      best_d = d;
    }
  }
  if (enemy != nullptr) {
    out.goal = Subgoal{enemy->pos, Posture::attrit, cfg.horizon};
    out.target_unit = enemy->id;
    return out;
  }
  // Screen the objective: distinct cells around it in ring order.
  std::vector<HexCoord> taken;
  for (const auto& [id, sg] : mgr.subgoals) {
    if (id != unit && sg.goal.posture == Posture::seize) taken.push_back(sg.goal.target);
  }
  for (int radius = 1; radius <= 3; ++radius) {
    for (HexCoord c : ring(obj, radius)) {
      if (!s.board->in_bounds(c) || !s.board->passable(c)) continue;
      if (std::find(taken.begin(), taken.end(), c) != taken.end()) continue;
      out.goal = Subgoal{c, Posture::seize, cfg.horizon};
      return out;
    }
  }
  out.goal = Subgoal{obj, Posture::seize, cfg.horizon};
  return out;
}

std::map<UnitId, Subgoal> manager_decide(ManagerAgent& mgr, const GameState& s,
                                         const HierarchyConfig& cfg) {
  std::erase_if(mgr.subgoals, [&](const auto& kv) {
    return s.find(kv.first) == nullptr ||
           std::find(mgr.units.begin(), mgr.units.end(), kv.first) == mgr.units.end();
  });
  for (UnitId id : mgr.units) {
    const Unit* u = s.find(id);
    if (u == nullptr) continue;
    auto it = mgr.subgoals.find(id);
    bool keep = it != mgr.subgoals.end() && s.turn - it->second.issued_turn < cfg.horizon;
    if (keep) {
      const ActiveSubgoal& sg = it->second;
      const bool satisfied =
          (sg.goal.posture == Posture::seize && u->pos == sg.goal.target) ||
          (sg.goal.posture == Posture::attrit && sg.target_unit >= 0 &&
           s.find(sg.target_unit) == nullptr);
      keep = !satisfied;
    }
    if (!keep) mgr.subgoals[id] = derive_subgoal(mgr, s, id, cfg);
  }
  std::map<UnitId, Subgoal> out;
  for (const auto& [id, sg] : mgr.subgoals) out.emplace(id, sg.goal);
  return out;
}

int num_options(const Board& b) { return 3 * static_cast<int>(b.objectives.size()); }

Assignment option_assignment(const Board& b, int option) {
  if (option < 0 || option >= num_options(b)) {
    throw std::invalid_argument("option index out of range");
  }
  const int obj = option / 3;
  static constexpr std::array<Posture, 3> kPostures{Posture::seize, Posture::defend,
                                                    Posture::attrit};
  return Assignment{b.objectives[static_cast<std::size_t>(obj)].pos,
                    kPostures[static_cast<std::size_t>(option % 3)], obj};
}

std::vector<double> manager_features(const GameState& s, const ManagerAgent& mgr, int grid) {
  Region region{s.board->width, s.board->height, -1, -1};
  int strength = 0;
  int alive = 0;
  for (UnitId id : mgr.units) {
    const Unit* u = s.find(id);
    if (u == nullptr) continue;
    region.q0 = std::min(region.q0, u->pos.q);
    region.r0 = std::min(region.r0, u->pos.r);
    region.q1 = std::max(region.q1, u->pos.q);
    region.r1 = std::max(region.r1, u->pos.r);
    strength += u->strength;
    ++alive;
  }
  if (alive == 0) region = Region{0, 0, s.board->width - 1, s.board->height - 1};
  region.q0 = std::max(0, region.q0 - kJoinRadius);
  region.r0 = std::max(0, region.r0 - kJoinRadius);
  region.q1 = std::min(s.board->width - 1, region.q1 + kJoinRadius);
  region.r1 = std::min(s.board->height - 1, region.r1 + kJoinRadius);
  auto f = encode_global(s, grid, region).values;
  f.push_back(strength / static_cast<double>(kMaxStrength * kMaxGroup));
  f.push_back(alive / static_cast<double>(kMaxGroup));
  return f;
}

int manager_choose(const ManagerModel& m, const GameState& s, const ManagerAgent& mgr) {
  const auto f = manager_features(s, mgr, m.grid);
  const Eigen::VectorXd q = m.net.forward(f);
  const int n = static_cast<int>(q.size());
  return greedy_action({q.data(), static_cast<std::size_t>(n)}, n >= 32 ? ~0u : (1u << n) - 1);
}

HierarchicalPolicy::HierarchicalPolicy(HierarchyConfig cfg, UnitPolicy unit_policy,
                                       CommanderPolicy commander)
    : cfg_(cfg), unit_policy_(std::move(unit_policy)), commander_(std::move(commander)) {}

void HierarchicalPolicy::reset(std::uint64_t /*seed*/) {
  managers_.clear();
  option_turn_.clear();
  initialized_ = false;
  commander_turn_ = -1;
  trace_ = nullptr;
}

void HierarchicalPolicy::sync_groups(const GameState& s, Faction faction) {
  if (!initialized_) {
    managers_ = partition_units(s, faction);
    initialized_ = true;
  }
  for (auto& m : managers_) {
    std::erase_if(m.units, [&](UnitId id) { return s.find(id) == nullptr; });
  }
  std::erase_if(managers_, [](const ManagerAgent& m) { return m.units.empty(); });
}

ManagerAgent& HierarchicalPolicy::group_of(const GameState& s, UnitId unit) {
  for (auto& m : managers_) {
    if (std::find(m.units.begin(), m.units.end(), unit) != m.units.end()) return m;
  }
  // Not grouped: join the nearest group, or found one.
  ++warnings_;
  const Unit* me = s.find(unit);
  ManagerAgent* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (auto& m : managers_) {
    const double d = frac_distance(as_pair(me->pos), centroid(s, m.units));
    if (d < best_d) {
      best = &m;
      best_d = d;
    }
  }
  if (best == nullptr) {
    ManagerAgent m;
    m.id = 0;
    managers_.push_back(std::move(m));
    best = &managers_.back();
  }
  best->units.push_back(unit);
  std::sort(best->units.begin(), best->units.end());
  best->remainder = static_cast<int>(best->units.size()) < kMinGroup;
  return *best;
}

void HierarchicalPolicy::refresh_commander(const GameState& s, Faction faction) {
  CommanderAgent c;
  c.faction = faction;
  c.width = s.board->width;
  c.height = s.board->height;
  c.objectives = s.board->objectives;
  for (const auto& m : managers_) {
    const auto [q, r] = centroid(s, m.units);
    c.managers.emplace_back(m.id, round_to_board(q, r, c.width, c.height));
  }
  const auto decision = commander_(c, encode_global(s, cfg_.grid));
  for (auto& m : managers_) {
    if (auto it = decision.find(m.id); it != decision.end()) m.assignment = it->second;
  }
  commander_turn_ = s.turn;
}

Action HierarchicalPolicy::act(const GameState& s, UnitId unit) {
  const Unit* me = s.find(unit);
  if (me == nullptr) throw std::invalid_argument("hierarchical_act: unit is not alive");
  const int warnings_before = warnings_;
  sync_groups(s, me->faction);
  ManagerAgent& mgr = group_of(s, unit);
  if (s.turn != commander_turn_) refresh_commander(s, me->faction);

  nlohmann::json option_trace;
  if (manager_model_ && !s.board->objectives.empty()) {
    auto it = option_turn_.find(mgr.id);
    if (it == option_turn_.end() || s.turn - it->second >= manager_model_->horizon) {
      const int option = manager_choose(*manager_model_, s, mgr);
      const Assignment a = option_assignment(*s.board, option);
      mgr.subgoals.clear();
      for (UnitId id : mgr.units) {
        mgr.subgoals[id] = ActiveSubgoal{Subgoal{a.target, a.posture, manager_model_->horizon},
                                         s.turn, -1};
      }
      option_turn_[mgr.id] = s.turn;
      option_trace = option;
    }
    if (!mgr.subgoals.contains(unit)) {
      const auto& any = mgr.subgoals.begin()->second;
      mgr.subgoals[unit] = ActiveSubgoal{any.goal, any.issued_turn, -1};
    }
  } else {
    manager_decide(mgr, s, cfg_);
  }

  const Subgoal goal = mgr.subgoals.at(unit).goal;
  const Action action = unit_policy_(s, unit, goal);
  trace_ = {{"manager", mgr.id},
            {"commander", mgr.assignment ? to_json(*mgr.assignment) : nlohmann::json(nullptr)},
            {"subgoal", to_json(goal)},
            {"unit", {{"id", unit}, {"action", action_to_json(action)}}}};
  if (!option_trace.is_null()) trace_["option"] = option_trace;
  if (warnings_ != warnings_before) trace_["warning"] = "unit was not in any group; auto-assigned";
  return action;
}

nlohmann::json model_to_json(const ManagerModel& m) {
  nlohmann::json j = {{"schema_version", kModelSchemaVersion},
                      {"kind", "manager"},
                      {"encoder", {{"grid", m.grid}}},
                      {"horizon", m.horizon},
                      {"num_objectives", m.num_objectives}};
  j.update(mlp_to_json(m.net));
  return j;
}

ManagerModel manager_model_from_json(const nlohmann::json& j) {
  if (document_kind(j) != "manager" || j.value("schema_version", 0) != kModelSchemaVersion) {
    throw ModelFormatError("expected a 'manager' model document");
  }
  ManagerModel m;
  try {
    m.grid = j.at("encoder").at("grid").get<int>();
    m.horizon = j.at("horizon").get<int>();
    m.num_objectives = j.at("num_objectives").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ModelFormatError(std::string("bad manager model: ") + e.what());
  }
  m.net = mlp_from_json(j);
  if (static_cast<std::size_t>(m.net.input_size()) != global_length(m.grid) + 2 ||
      m.net.output_size() != 3 * m.num_objectives) {
    throw ModelFormatError("manager network shape does not match its header");
  }
  return m;
}

}  // namespace hexwar

#include "hexwar/observation.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace hexwar {

nlohmann::json to_json(const EncoderParams& p) {
  return {{"radius", p.radius}, {"horizon", p.horizon}, {"cap", p.cap}, {"grid", p.grid}};
}

EncoderParams encoder_params_from_json(const nlohmann::json& j) {
  EncoderParams p;
  p.radius = j.value("radius", p.radius);
  p.horizon = j.value("horizon", p.horizon);
  p.cap = j.value("cap", p.cap);
  p.grid = j.value("grid", p.grid);
  if (p.radius < 1 || p.radius >= p.horizon || p.grid < 1 || !(p.cap > 0.0)) {
    throw std::invalid_argument("invalid encoder parameters");
  }
  return p;
}

double decay_weight(int d, int radius, int horizon) {
  if (radius >= horizon) {
    throw std::invalid_argument("decay_weight requires radius < horizon");
  }
  if (d < 0) throw std::invalid_argument("decay_weight requires d >= 0");
  if (d <= radius) return 1.0;
  if (d >= horizon) return 0.0;
  return static_cast<double>(horizon - d) / static_cast<double>(horizon - radius);
}

std::array<double, kNumLocalChannels> cell_channels(const GameState& s, Faction viewer,
                                                    HexCoord cell,
                                                    std::optional<HexCoord> subgoal) {
  std::array<double, kNumLocalChannels> v{};
  const Board& b = *s.board;
  if (!b.in_bounds(cell)) {
    v[kMoveCost] = 1.0;
    return v;
  }
  if (const Unit* u = s.unit_at(cell)) {
    const double str = u->strength / static_cast<double>(kMaxStrength);
    v[u->faction == viewer ? kFriendly : kEnemy] = str;
  }
  if (const int oi = b.objective_at(cell); oi >= 0) {
    const int max_value = b.max_objective_value();
    if (max_value > 0) {
      v[kObjective] = b.objectives[static_cast<std::size_t>(oi)].value /
                      static_cast<double>(max_value);
    }
  }
  const TerrainInfo t = terrain_info(b.terrain_at(cell));
  v[kMoveCost] = t.passable ? t.move_cost / 2.0 : 1.0;
  v[kDefense] = t.defense_bp / 10000.0;
  if (subgoal && *subgoal == cell) v[kSubgoal] = 1.0;
  return v;
}

LocalEncoder::LocalEncoder(EncoderParams params) : params_(params) {
  if (params_.radius < 1 || params_.radius >= params_.horizon) {
    throw std::invalid_argument("encoder requires 1 <= radius < horizon");
  }
  const HexCoord origin{};
  window_ = disk(origin, params_.radius);
  // Cells with nonzero weight beyond the window: radius < d < horizon.
  for (int d = params_.radius + 1; d < params_.horizon; ++d) {
    const double w = decay_weight(d, params_.radius, params_.horizon);
    for (HexCoord off : ring(origin, d)) {
      const HexCoord target = radial_target(origin, off, params_.radius);
      far_.push_back({off, disk_index(origin, target, params_.radius), w});
    }
  }
}

ObservationVector LocalEncoder::encode(const GameState& s, UnitId unit,
                                       std::optional<HexCoord> subgoal) const {
  const Unit* me = s.find(unit);
  if (me == nullptr) {
    throw std::invalid_argument("encode_local: unit " + std::to_string(unit) +
                                " is not alive");
  }
  const std::size_t n = window_.size();
  ObservationVector obs;
  obs.radius = params_.radius;
  obs.values.assign(length(), 0.0);

  const Board& b = *s.board;
  auto channels_at = [&](HexCoord c) { return cell_channels(s, me->faction, c, subgoal); };

  for (std::size_t i = 0; i < n; ++i) {
    const auto v = channels_at(me->pos + window_[i]);
    for (int c = 0; c < kNumLocalChannels; ++c) {
      obs.values[static_cast<std::size_t>(c) * n + i] = v[static_cast<std::size_t>(c)];
    }
  }
  for (const FarCell& fc : far_) {
    const auto v = channels_at(me->pos + fc.offset);
    for (int c = 0; c < kNumLocalChannels; ++c) {
      if (v[static_cast<std::size_t>(c)] != 0.0) {
        obs.values[static_cast<std::size_t>(c) * n + static_cast<std::size_t>(fc.ring_index)] +=
            fc.weight * v[static_cast<std::size_t>(c)];
      }
    }
  }
  for (std::size_t i = 0; i < n * kNumLocalChannels; ++i) {
    obs.values[i] = std::clamp(obs.values[i], 0.0, params_.cap);
  }
  obs.values[n * kNumLocalChannels] = me->strength / static_cast<double>(kMaxStrength);
  obs.values[n * kNumLocalChannels + 1] =
      static_cast<double>(s.turn) / static_cast<double>(b.max_turns);
  return obs;
}

ObservationVector encode_local(const GameState& s, UnitId unit, const EncoderParams& params,
                               std::optional<HexCoord> subgoal) {
  thread_local std::map<std::pair<int, int>, LocalEncoder> cache;
  auto key = std::make_pair(params.radius, params.horizon);
  auto it = cache.find(key);
  if (it == cache.end() || it->second.params().cap != params.cap) {
    it = cache.insert_or_assign(key, LocalEncoder(params)).first;
  }
  return it->second.encode(s, unit, subgoal);
}

int super_cell(const Region& region, int grid, HexCoord c) {
  if (!region.contains(c)) return -1;
  const int w = region.q1 - region.q0 + 1;
  const int h = region.r1 - region.r0 + 1;
  const int col = (c.q - region.q0) * grid / w;
  const int row = (c.r - region.r0) * grid / h;
  return row * grid + col;
}

GlobalAbstraction encode_global(const GameState& s, int grid) {
  return encode_global(s, grid, Region{0, 0, s.board->width - 1, s.board->height - 1});
}

GlobalAbstraction encode_global(const GameState& s, int grid, const Region& region) {
  if (grid < 1) throw std::invalid_argument("encode_global requires grid >= 1");
  const std::size_t cells = static_cast<std::size_t>(grid * grid);
  GlobalAbstraction g;
  g.grid = grid;
  g.values.assign(global_length(grid), 0.0);
  auto slot = [&](int channel, int cell) -> double& {
    return g.values[static_cast<std::size_t>(channel) * cells + static_cast<std::size_t>(cell)];
  };
  for (const auto& u : s.units) {
    const int cell = super_cell(region, grid, u.pos);
    if (cell < 0) continue;
    slot(u.faction == Faction::blue ? 0 : 1, cell) +=
        u.strength / static_cast<double>(kMaxStrength);
  }
  std::vector<int> held(cells, 0);
  std::vector<int> count(cells, 0);
  for (const auto& o : s.board->objectives) {
    const int cell = super_cell(region, grid, o.pos);
    if (cell < 0) continue;
    slot(2, cell) += o.value;
    ++count[static_cast<std::size_t>(cell)];
    const Unit* holder = s.unit_at(o.pos);
    if (holder != nullptr && holder->faction == Faction::blue) {
      ++held[static_cast<std::size_t>(cell)];
    }
  }
  for (std::size_t c = 0; c < cells; ++c) {
    if (count[c] > 0) slot(3, static_cast<int>(c)) = static_cast<double>(held[c]) / count[c];
  }
  g.values.back() = static_cast<double>(s.turn) / static_cast<double>(s.board->max_turns);
  return g;
}

}  // namespace hexwar

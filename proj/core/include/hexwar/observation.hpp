#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hexwar/engine.hpp"

namespace hexwar {

struct EncoderParams {
  int radius = 3;      // exact window radius
  int horizon = 12;    // decay reaches zero at this distance
  double cap = 4.0;    // clamp for accumulated cells
  int grid = 4;        // super-cells per side of the global abstraction
};

nlohmann::json to_json(const EncoderParams& p);
EncoderParams encoder_params_from_json(const nlohmann::json& j);

// Local channels, in order.
enum LocalChannel : int {
  kFriendly = 0,
  kEnemy,
  kObjective,
  kMoveCost,
  kDefense,
  kSubgoal,
  kNumLocalChannels
};

inline constexpr int kNumLocalScalars = 2;

constexpr std::size_t local_length(int radius) {
  return static_cast<std::size_t>(kNumLocalChannels * disk_size(radius) + kNumLocalScalars);
}

// Piecewise-linear distance weight: 1 up to `radius`, linear down to 0 at
// `horizon`, 0 beyond. Throws std::invalid_argument unless radius < horizon.
double decay_weight(int d, int radius, int horizon);

// Fixed-size encoding centered on one unit. Layout: for each channel, the
// disk(radius) cells in canonical order; then own strength and turn fraction.
struct ObservationVector {
  int radius = 3;
  std::vector<double> values;

  std::size_t cells() const { return static_cast<std::size_t>(disk_size(radius)); }
  std::span<const double> channel(int c) const {
    return {values.data() + static_cast<std::size_t>(c) * cells(), cells()};
  }
  double at(int c, std::size_t cell) const {
    return values[static_cast<std::size_t>(c) * cells() + cell];
  }
  double own_strength() const { return values[values.size() - 2]; }
  double turn_fraction() const { return values[values.size() - 1]; }
};

// Exact channel values of one hex as seen by `viewer`. Off-board hexes read
// as impassable: move cost 1, everything else 0.
std::array<double, kNumLocalChannels> cell_channels(const GameState& s, Faction viewer,
                                                    HexCoord cell,
                                                    std::optional<HexCoord> subgoal);

// Encoder with the far-field routing table precomputed for one parameter set.
class LocalEncoder {
 public:
  explicit LocalEncoder(EncoderParams params);

  const EncoderParams& params() const { return params_; }
  std::size_t length() const { return local_length(params_.radius); }

  // Throws std::invalid_argument if `unit` is not alive.
  ObservationVector encode(const GameState& s, UnitId unit,
                           std::optional<HexCoord> subgoal = std::nullopt) const;

 private:
  struct FarCell {
    HexCoord offset;
    int ring_index;  // index into disk ordering
    double weight;
  };

  EncoderParams params_;
  std::vector<HexCoord> window_;  // disk(0, radius) offsets
  std::vector<FarCell> far_;
};

ObservationVector encode_local(const GameState& s, UnitId unit, const EncoderParams& params,
                               std::optional<HexCoord> subgoal = std::nullopt);

inline constexpr int kNumGlobalChannels = 4;

// Coarse grid x grid summary of the board (or of a rectangular region of
// it). Layout: channel-major [channel][row][col], then turn fraction.
// Channels: blue strength/100, red strength/100, objective value sum,
// fraction of objectives held by blue.
struct GlobalAbstraction {
  int grid = 4;
  std::vector<double> values;

  double at(int channel, int row, int col) const {
    return values[static_cast<std::size_t>((channel * grid + row) * grid + col)];
  }
  double turn_fraction() const { return values.back(); }
};

constexpr std::size_t global_length(int grid) {
  return static_cast<std::size_t>(kNumGlobalChannels * grid * grid + 1);
}

struct Region {
  int q0 = 0, r0 = 0, q1 = 0, r1 = 0;  // inclusive bounds

  bool contains(HexCoord c) const { return c.q >= q0 && c.q <= q1 && c.r >= r0 && c.r <= r1; }
};

// Super-cell (row * grid + col) holding `c` inside `region`, or -1.
int super_cell(const Region& region, int grid, HexCoord c);

GlobalAbstraction encode_global(const GameState& s, int grid = 4);
GlobalAbstraction encode_global(const GameState& s, int grid, const Region& region);

}  // namespace hexwar

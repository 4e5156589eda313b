#include "hexwar/hexgrid.hpp"

#include <stdexcept>
#include <string>

namespace hexwar {

namespace {

constexpr std::array<int, kNumDirections> kRingWalk{2, 3, 4, 5, 0, 1};

}  // namespace

std::vector<HexCoord> ring(HexCoord center, int radius) {
  if (radius < 1) {
    throw std::invalid_argument("ring radius must be >= 1, got " +
                                std::to_string(radius));
  }
  std::vector<HexCoord> cells;
  cells.reserve(static_cast<std::size_t>(6 * radius));
  HexCoord cur = center + kDirections[0] * radius;
  for (int dir : kRingWalk) {
    for (int step = 0; step < radius; ++step) {
      cells.push_back(cur);
      cur = neighbor(cur, dir);
    }
  }
  return cells;
}

std::vector<HexCoord> disk(HexCoord center, int radius) {
  if (radius < 0) {
    throw std::invalid_argument("disk radius must be >= 0");
  }
  std::vector<HexCoord> cells;
  cells.reserve(static_cast<std::size_t>(disk_size(radius)));
  cells.push_back(center);
  for (int k = 1; k <= radius; ++k) {
    auto layer = ring(center, k);
    cells.insert(cells.end(), layer.begin(), layer.end());
  }
  return cells;
}

int disk_index(HexCoord center, HexCoord cell, int radius) {
  const int d = distance(center, cell);
  if (d > radius) return -1;
  if (d == 0) return 0;
  // Offset of this ring's first cell in disk order.
  const int base = disk_size(d - 1);
  const HexCoord rel = cell - center;
  // Walk the ring in closed form: side s covers direction kRingWalk[s].
  HexCoord corner = kDirections[0] * d;
  for (int side = 0; side < kNumDirections; ++side) {
    const HexCoord step = kDirections[static_cast<std::size_t>(kRingWalk[side])];
    for (int i = 0; i < d; ++i) {
      if (corner + step * i == rel) return base + side * d + i;
    }
    corner = corner + step * d;
  }
  return -1;
}

HexCoord radial_target(HexCoord center, HexCoord far, int radius) {
  if (radius < 1 || distance(center, far) <= radius) {
    throw std::invalid_argument(
        "radial_target requires distance(center, far) > radius >= 1");
  }
  HexCoord best{};
  int best_d = -1;
  for (HexCoord c : ring(center, radius)) {
    const int d = distance(c, far);
    if (best_d < 0 || d < best_d) {
      best = c;
      best_d = d;
    }
  }
  return best;
}

int direction_to(HexCoord from, HexCoord to) {
  const HexCoord delta = to - from;
  for (int d = 0; d < kNumDirections; ++d) {
    if (kDirections[static_cast<std::size_t>(d)] == delta) return d;
  }
  return -1;
}

}  // namespace hexwar

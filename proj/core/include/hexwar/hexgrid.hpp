#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <functional>
#include <vector>

namespace hexwar {

// Axial hex coordinate. q is the column, r the row.
struct HexCoord {
  int q = 0;
  int r = 0;

  friend constexpr bool operator==(HexCoord, HexCoord) = default;
  friend constexpr auto operator<=>(HexCoord, HexCoord) = default;

  constexpr HexCoord operator+(HexCoord o) const { return {q + o.q, r + o.r}; }
  constexpr HexCoord operator-(HexCoord o) const { return {q - o.q, r - o.r}; }
  constexpr HexCoord operator*(int k) const { return {q * k, r * k}; }
};

inline constexpr int kNumDirections = 6;

// Canonical neighbor offsets, indexed 0..5.
inline constexpr std::array<HexCoord, kNumDirections> kDirections{{
    {+1, 0}, {+1, -1}, {0, -1}, {-1, 0}, {-1, +1}, {0, +1}}};

constexpr HexCoord neighbor(HexCoord c, int direction) {
  return c + kDirections[static_cast<std::size_t>(direction)];
}

constexpr int distance(HexCoord a, HexCoord b) {
  const int dq = a.q - b.q;
  const int dr = a.r - b.r;
  const int ds = dq + dr;
  return ((dq < 0 ? -dq : dq) + (dr < 0 ? -dr : dr) + (ds < 0 ? -ds : ds)) / 2;
}

// Cells at exactly `radius` from center, starting at center + radius*dir0 and
// walking `radius` steps along directions 2,3,4,5,0,1. Throws
// std::invalid_argument for radius < 1.
std::vector<HexCoord> ring(HexCoord center, int radius);

// Center followed by ring(1)..ring(radius). This ordering is the cell order
// used by the local observation encoding.
std::vector<HexCoord> disk(HexCoord center, int radius);

constexpr int disk_size(int radius) { return 1 + 3 * radius * (radius + 1); }

// Position of `cell` within disk(center, radius) ordering, or -1 when the
// cell lies outside the disk. Inverse of disk().
int disk_index(HexCoord center, HexCoord cell, int radius);

// The ring(center, radius) cell closest to `far`; ties go to the earliest
// cell in ring order. Requires distance(center, far) > radius.
HexCoord radial_target(HexCoord center, HexCoord far, int radius);

// Index of the direction whose single step from `from` lands on `to`, or -1.
int direction_to(HexCoord from, HexCoord to);

}  // namespace hexwar

template <>
struct std::hash<hexwar::HexCoord> {
  std::size_t operator()(hexwar::HexCoord c) const noexcept {
    return std::hash<long long>{}((static_cast<long long>(c.q) << 32) ^
                                  static_cast<unsigned int>(c.r));
  }
};

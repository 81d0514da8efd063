// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace mrflow {

enum class Face : std::uint8_t { x_lo = 0, x_hi = 1, y_lo = 2, y_hi = 3, z_lo = 4, z_hi = 5 };

inline constexpr std::array<Face, 6> kAllFaces{Face::x_lo, Face::x_hi, Face::y_lo,
                                               Face::y_hi, Face::z_lo, Face::z_hi};

constexpr int face_axis(Face f) noexcept { return static_cast<int>(f) / 2; }
constexpr bool face_is_high(Face f) noexcept { return (static_cast<int>(f) & 1) != 0; }
constexpr Face opposite(Face f) noexcept { return static_cast<Face>(static_cast<int>(f) ^ 1); }
std::string_view face_name(Face f) noexcept;

enum class BoundaryCondition { periodic, neumann, dirichlet, reflecting };

std::string_view to_string(BoundaryCondition bc) noexcept;
/// Parses "periodic", "neumann", "dirichlet" or "reflecting".
BoundaryCondition parse_boundary(std::string_view text);

using BoundarySet = std::array<BoundaryCondition, 6>;  // indexed by Face

inline constexpr BoundarySet all_boundaries(BoundaryCondition bc) noexcept {
  return {bc, bc, bc, bc, bc, bc};
}

/// Cell-centered uniform grid on a box.
struct UniformGrid {
  std::array<double, 3> lower{0.0, 0.0, 0.0};
  std::array<double, 3> upper{1.0, 1.0, 1.0};
  std::array<long, 3> cells{1, 1, 1};

  double spacing(int axis) const noexcept {
    return (upper[axis] - lower[axis]) / static_cast<double>(cells[axis]);
  }
  double center(int axis, long i) const noexcept {
    return lower[axis] + (static_cast<double>(i) + 0.5) * spacing(axis);
  }
  long cell_count() const noexcept { return cells[0] * cells[1] * cells[2]; }
};

struct IndexRange {
  long begin = 0;
  long end = 0;
  long size() const noexcept { return end - begin; }
};

/// Splits `tasks` into three factors as close to equal as possible
/// (minimal max/min ratio, then smallest maximum), sorted nonincreasing.
std::array<int, 3> dims_create(int tasks);

/// Contiguous share of `n` cells for part `coord` of `parts`; remainder
/// cells go to the lowest coordinates. Throws std::out_of_range.
IndexRange split_range(long n, int parts, int coord);

/// Global grid split over a 3D task layout. Ranks are row-major in the
/// task coordinates (z fastest).
class Decomposition {
 public:
  Decomposition(const UniformGrid& grid, int tasks, const BoundarySet& boundaries);
  Decomposition(const UniformGrid& grid, std::array<int, 3> layout, const BoundarySet& boundaries);

  const UniformGrid& grid() const noexcept { return grid_; }
  const std::array<int, 3>& layout() const noexcept { return layout_; }
  int tasks() const noexcept { return layout_[0] * layout_[1] * layout_[2]; }
  const BoundarySet& boundaries() const noexcept { return boundaries_; }
  BoundaryCondition boundary(Face f) const noexcept { return boundaries_[static_cast<int>(f)]; }

  std::array<int, 3> coords(int rank) const;
  int rank_of(const std::array<int, 3>& coords) const;

  /// Owned global index ranges of the task at `coords`.
  std::array<IndexRange, 3> local_extents(const std::array<int, 3>& coords) const;
  std::array<IndexRange, 3> extents_of(int rank) const { return local_extents(coords(rank)); }

  /// Rank across `face`, or nullopt at a physical (non-periodic) boundary.
  std::optional<int> neighbor(int rank, Face face) const;

 private:
  void validate() const;

  UniformGrid grid_;
  std::array<int, 3> layout_{1, 1, 1};
  BoundarySet boundaries_{};
};

}  // namespace mrflow

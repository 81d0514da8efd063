// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrflow/grid.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "mrflow/error.hpp"

namespace mrflow {

std::string_view face_name(Face f) noexcept {
  static constexpr std::array<std::string_view, 6> kNames{"x_lo", "x_hi", "y_lo",
                                                          "y_hi", "z_lo", "z_hi"};
  return kNames[static_cast<int>(f)];
}

std::string_view to_string(BoundaryCondition bc) noexcept {
  switch (bc) {
    case BoundaryCondition::periodic:
      return "periodic";
    case BoundaryCondition::neumann:
      return "neumann";
    case BoundaryCondition::dirichlet:
      return "dirichlet";
    case BoundaryCondition::reflecting:
      return "reflecting";
  }
  return "?";
}

BoundaryCondition parse_boundary(std::string_view text) {
  for (auto bc : {BoundaryCondition::periodic, BoundaryCondition::neumann,
                  BoundaryCondition::dirichlet, BoundaryCondition::reflecting}) {
    if (text == to_string(bc)) return bc;
  }
  throw ConfigError("unknown boundary condition '" + std::string(text) + "'");
}

std::array<int, 3> dims_create(int tasks) {
  if (tasks < 1) throw ConfigError("task count must be positive");
  std::array<int, 3> best{tasks, 1, 1};
  auto worse = [](const std::array<int, 3>& a, const std::array<int, 3>& b) {
    // a is worse than b: compare max/min ratio exactly via cross products
    const long lhs = static_cast<long>(a[0]) * b[2];
    const long rhs = static_cast<long>(b[0]) * a[2];
    if (lhs != rhs) return lhs > rhs;
    return a[0] > b[0];
  };
  for (int p = 1; p <= tasks; ++p) {
    if (tasks % p) continue;
    for (int q = 1; q <= p; ++q) {
      if ((tasks / p) % q) continue;
      const int r = tasks / p / q;
      if (r > q) continue;
      const std::array<int, 3> cand{p, q, r};  // p >= q >= r
      if (worse(best, cand)) best = cand;
    }
  }
  return best;
}

IndexRange split_range(long n, int parts, int coord) {
  if (parts < 1 || coord < 0 || coord >= parts) {
    throw std::out_of_range("task coordinate " + std::to_string(coord) + " outside layout of " +
                            std::to_string(parts));
  }
  const long base = n / parts;
  const long extra = n % parts;
  const long begin = coord * base + std::min<long>(coord, extra);
  return {begin, begin + base + (coord < extra ? 1 : 0)};
}

Decomposition::Decomposition(const UniformGrid& grid, int tasks, const BoundarySet& boundaries)
    : Decomposition(grid, dims_create(tasks), boundaries) {}

Decomposition::Decomposition(const UniformGrid& grid, std::array<int, 3> layout,
                             const BoundarySet& boundaries)
    : grid_(grid), layout_(layout), boundaries_(boundaries) {
  validate();
}

void Decomposition::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (grid_.cells[a] < 1) throw ConfigError("grid needs at least one cell per axis");
    if (!(grid_.upper[a] > grid_.lower[a])) throw ConfigError("grid bounds must be increasing");
    if (layout_[a] < 1) throw ConfigError("task layout entries must be positive");
    if (layout_[a] > grid_.cells[a]) {
      throw ConfigError("more tasks than cells along axis " + std::to_string(a));
    }
    const auto lo = boundaries_[2 * a];
    const auto hi = boundaries_[2 * a + 1];
    if ((lo == BoundaryCondition::periodic) != (hi == BoundaryCondition::periodic)) {
      throw ConfigError("periodic boundaries must be set on both faces of an axis");
    }
    // Three ghost layers come from a single neighbor or a mirror of owned cells.
    const long smallest = grid_.cells[a] / layout_[a];
    const bool self_periodic = layout_[a] == 1 && lo == BoundaryCondition::periodic;
    if (!self_periodic && smallest < 3) {
      throw ConfigError("axis " + std::to_string(a) + " needs at least 3 cells per task");
    }
  }
}

std::array<int, 3> Decomposition::coords(int rank) const {
  if (rank < 0 || rank >= tasks()) throw std::out_of_range("rank outside decomposition");
  return {rank / (layout_[1] * layout_[2]), (rank / layout_[2]) % layout_[1], rank % layout_[2]};
}

int Decomposition::rank_of(const std::array<int, 3>& c) const {
  for (int a = 0; a < 3; ++a) {
    if (c[a] < 0 || c[a] >= layout_[a]) throw std::out_of_range("task coordinates outside layout");
  }
  return (c[0] * layout_[1] + c[1]) * layout_[2] + c[2];
}

std::array<IndexRange, 3> Decomposition::local_extents(const std::array<int, 3>& c) const {
  return {split_range(grid_.cells[0], layout_[0], c[0]), split_range(grid_.cells[1], layout_[1], c[1]),
          split_range(grid_.cells[2], layout_[2], c[2])};
}

std::optional<int> Decomposition::neighbor(int rank, Face face) const {
  auto c = coords(rank);
  const int a = face_axis(face);
  const int step = face_is_high(face) ? 1 : -1;
  int n = c[a] + step;
  if (n < 0 || n >= layout_[a]) {
    if (boundary(face) != BoundaryCondition::periodic) return std::nullopt;
    n = (n + layout_[a]) % layout_[a];
  }
  c[a] = n;
  return rank_of(c);
}

}  // namespace mrflow

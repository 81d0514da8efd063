// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace mrflow {

/// One row of the weak-scaling ladder: the mesh grows with n in every
/// direction while the slow step and final time shrink as 1/n.
struct ScalingPlanRow {
  int n = 1;
  std::array<long, 3> cells{};
  double h_slow = 0.0;
  double h_fast = 0.0;
  double tf = 0.0;
  double transient_end = 0.0;
  std::int64_t unknowns = 0;  // cells x 15
  int nodes = 0;              // 2 n^3
  int tasks = 0;              // 40 per node

  std::int64_t cell_count() const noexcept {
    return static_cast<std::int64_t>(cells[0]) * cells[1] * cells[2];
  }
};

/// Throws ConfigError for n < 1.
ScalingPlanRow scaling_plan(int n);

/// Human-readable row, floats with 17 significant digits.
std::string format_plan_row(const ScalingPlanRow& row);

}  // namespace mrflow

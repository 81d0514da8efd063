// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrflow/plan.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "mrflow/error.hpp"
#include "mrflow/state.hpp"

namespace mrflow {

ScalingPlanRow scaling_plan(int n) {
  if (n < 1) throw ConfigError("plan index must be at least 1");
  ScalingPlanRow row;
  row.n = n;
  row.cells = {125L * n, 100L * n, 100L * n};
  // Each value is one integer ratio, so a single rounding.
  row.h_slow = 1.0 / (10.0 * n);
  row.h_fast = 1.0 / (10000.0 * n);
  row.tf = 1.0 / n;
  row.transient_end = std::min(0.1, row.tf);
  row.unknowns = row.cell_count() * kFieldsPerCell;
  row.nodes = 2 * n * n * n;
  row.tasks = 40 * row.nodes;
  return row;
}

std::string format_plan_row(const ScalingPlanRow& row) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "n = " << row.n << '\n'
      << "mesh = " << row.cells[0] << " x " << row.cells[1] << " x " << row.cells[2] << '\n'
      << "unknowns = " << row.unknowns << '\n'
      << "nodes = " << row.nodes << '\n'
      << "tasks = " << row.tasks << '\n'
      << "h_slow = " << row.h_slow << '\n'
      << "h_fast = " << row.h_fast << '\n'
      << "tf = " << row.tf << '\n'
      << "transient = (0, " << row.transient_end << "]\n";
  return out.str();
}

}  // namespace mrflow

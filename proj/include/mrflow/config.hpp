// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "mrflow/ark.hpp"
#include "mrflow/chemistry.hpp"
#include "mrflow/grid.hpp"
#include "mrflow/vectors.hpp"

namespace mrflow {

enum class ProblemKind { primordial, density_wave };
std::string_view to_string(ProblemKind p) noexcept;

/// Everything one simulation run needs. Lengths and times are
/// dimensionless; `units` converts the CGS initial conditions.
struct RunConfig {
  ProblemKind problem = ProblemKind::primordial;
  std::array<long, 3> cells{16, 16, 16};
  int tasks = 1;
  std::array<double, 3> lower{0.0, 0.0, 0.0};
  std::array<double, 3> upper{1.0, 1.0, 1.0};
  BoundarySet boundaries = all_boundaries(BoundaryCondition::reflecting);

  double t0 = 0.0;
  double tf = 1e-3;
  double h_slow = 1e-3;
  double h_fast = 1e-6;
  double transient = 0.1;

  VectorOptions vectors;
  Tolerances tol;
  std::string slow_table = "kw3";
  std::string fast_table = "ark324";

  bool reactions = true;
  SurrogateParams network{1e2, 1e4, 1e-2, 0.0};  // e_ref 0: mean initial e_g
  InitialConditions initial;
  UnitSystem units;
  std::uint64_t seed = 20260101;
  long clump_count = 0;  // 0: 10 per task

  std::string csv_path;
  std::string snapshot_path;

  /// Throws ConfigError naming the offending key.
  void validate() const;
  long effective_clump_count() const noexcept { return clump_count > 0 ? clump_count : 10L * tasks; }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// INI-style text: [section] headers with key = value lines. Missing keys
/// keep their defaults; unknown keys are errors.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);
/// Every key, floats with 17 significant digits; parse_config inverts it.
std::string emit_config(const RunConfig& config);

/// Sets one "section.key" to a textual value (command-line overrides).
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

}  // namespace mrflow

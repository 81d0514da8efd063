// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "mrflow/chemistry.hpp"
#include "mrflow/config.hpp"
#include "mrflow/mri.hpp"
#include "mrflow/newton.hpp"
#include "mrflow/profiling.hpp"

namespace mrflow {

/// Fast right-hand side of a simulation state: the reaction network in
/// every cell (zero when reactions are off), with a cell-block Jacobian.
class ChemistryProblem final : public ImplicitProblem {
 public:
  ChemistryProblem(long cells, SurrogateNetwork network, bool reactions, Profiler* profiler = nullptr);

  void rhs(double t, const ManyVector& y, ManyVector& f) override;
  const BlockLayout& layout() const override { return layout_; }
  CsrMatrix jacobian_pattern() const override { return pattern_; }
  void jacobian(double t, const ManyVector& y, CsrMatrix& j) override;

  /// Fault injection: Jacobian evaluations write NaN into this cell's block
  /// so factoring it fails. A negative cell turns injection off.
  void inject_singular_block(long cell) noexcept { singular_cell_ = cell; }

  const SurrogateNetwork& network() const noexcept { return network_; }

 private:
  long cells_;
  SurrogateNetwork network_;
  bool reactions_;
  Profiler* profiler_;
  CellBlockLayout layout_;
  CsrMatrix pattern_;
  long singular_cell_ = -1;
};

/// e_g slot := e_t - |m|^2 / (2 rho) in every cell.
void synchronize_energy(ManyVector& state);

struct RunResult {
  ProfileSummary profile;
  TwoPhaseStats phases;
  /// Global state gathered on rank 0: one array per field, cells in global
  /// row-major order (x fastest).
  std::vector<std::vector<double>> state;
  std::uint64_t reduction_rounds = 0;  // rank 0, whole run
  std::uint64_t messages = 0;          // rank 0, whole run
  long slow_steps = 0;
  double reference_energy = 0.0;
};

/// Runs `config.tasks` in-process tasks end to end. Deterministic for a
/// fixed config. Throws the first task error (ConfigError, SolverError,
/// IoError, ...).
RunResult run_simulation(const RunConfig& config);

/// Sum over cells of each field of a gathered state (exact sums).
std::vector<double> field_totals(const std::vector<std::vector<double>>& state);

}  // namespace mrflow

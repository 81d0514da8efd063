// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace mrflow {

enum class TableKind { explicit_rk, dirk };

/// Runge-Kutta coefficients. A is stored row-major (stages x stages).
/// `embedded` is empty for tables without an error estimate.
struct ButcherTable {
  std::string name;
  TableKind kind = TableKind::explicit_rk;
  int stages = 0;
  std::vector<double> A;
  std::vector<double> b;
  std::vector<double> embedded;
  std::vector<double> c;
  int order = 0;
  int embedded_order = 0;

  double a(int i, int j) const noexcept { return A[static_cast<std::size_t>(i * stages + j)]; }
  bool has_embedding() const noexcept { return !embedded.empty(); }

  /// Throws ConfigError on shape, structure, sum(b) = 1 or row-sum
  /// violations (row sums checked to 1e-14).
  void validate() const;
};

/// L-stable ESDIRK 3(2), four stages, explicit first stage.
ButcherTable ark324_esdirk();
/// Explicit 3(2) pair with FSAL structure (used as an adaptive ERK).
ButcherTable bogacki_shampine();
/// Classical explicit RK4 (no embedding).
ButcherTable classical_rk4();
/// Three-stage third-order explicit slow table for the multirate method.
ButcherTable kw3_slow();

/// Lookup by name ("ark324", "bs32", "rk4", "kw3").
ButcherTable table_by_name(const std::string& name);

}  // namespace mrflow

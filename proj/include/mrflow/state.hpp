// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "mrflow/halo.hpp"
#include "mrflow/vectors.hpp"

namespace mrflow {

// Per-cell unknowns: five fluid fields followed by the chemistry slots.
inline constexpr int kFluidFields = 5;
inline constexpr int kSpecies = 10;
inline constexpr int kFieldsPerCell = kFluidFields + kSpecies;

namespace field {
inline constexpr int rho = 0;
inline constexpr int mx = 1;
inline constexpr int my = 2;
inline constexpr int mz = 3;
inline constexpr int et = 4;
inline constexpr int chem = 5;  // first chemistry slot
}  // namespace field

/// Simulation state on one task: one distributed subvector per fluid field
/// and one task-local block holding the chemistry slots cell-major.
ManyVector make_state(Collective& comm, long cells, VectorOptions options = {});

/// Field accessor over a state vector (fields 0..14 as above).
FieldAccessor state_fields(const ManyVector& state);

/// Number of owned cells in a state vector.
long state_cells(const ManyVector& state);

}  // namespace mrflow

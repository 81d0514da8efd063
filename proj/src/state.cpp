// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrflow/state.hpp"

#include <array>

#include "mrflow/error.hpp"

namespace mrflow {

ManyVector make_state(Collective& comm, long cells, VectorOptions options) {
  const auto n = static_cast<std::size_t>(cells);
  const std::array<SubvectorRequest, 6> subs{{
      {VectorKind::distributed_field, n},
      {VectorKind::distributed_field, n},
      {VectorKind::distributed_field, n},
      {VectorKind::distributed_field, n},
      {VectorKind::distributed_field, n},
      {VectorKind::task_local_block, n * kSpecies},
  }};
  return ManyVector::create(comm, subs, options);
}

FieldAccessor state_fields(const ManyVector& state) {
  if (state.subvector_count() != kFluidFields + 1) {
    throw ConformanceError("not a simulation state vector");
  }
  // The accessor hands out mutable references; callers holding a const
  // state only read through it.
  auto& s = const_cast<ManyVector&>(state);
  std::vector<double*> base(kFieldsPerCell);
  std::vector<std::ptrdiff_t> stride(kFieldsPerCell);
  for (int v = 0; v < kFluidFields; ++v) {
    base[v] = s.sub(static_cast<std::size_t>(v)).data();
    stride[v] = 1;
  }
  double* chem = s.sub(kFluidFields).data();
  for (int c = 0; c < kSpecies; ++c) {
    base[kFluidFields + c] = chem + c;
    stride[kFluidFields + c] = kSpecies;
  }
  return FieldAccessor(std::move(base), std::move(stride));
}

long state_cells(const ManyVector& state) {
  return static_cast<long>(state.sub(0).size());
}

}  // namespace mrflow

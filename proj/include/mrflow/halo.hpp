// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mrflow/collective.hpp"
#include "mrflow/grid.hpp"
#include "mrflow/profiling.hpp"

namespace mrflow {

inline constexpr int kGhostDepth = 3;

/// Owned cell box of one task; cell index c = i + nx*(j + ny*k).
struct LocalBox {
  std::array<long, 3> n{1, 1, 1};
  std::array<long, 3> offset{0, 0, 0};  // global index of local (0,0,0)

  long cells() const noexcept { return n[0] * n[1] * n[2]; }
  long index(long i, long j, long k) const noexcept { return i + n[0] * (j + n[1] * k); }
};

/// Strided access to `fields` scalar fields over the cells of a box:
/// field v of cell c lives at base[v][c * stride[v]].
class FieldAccessor {
 public:
  FieldAccessor() = default;
  FieldAccessor(std::vector<double*> base, std::vector<std::ptrdiff_t> stride)
      : base_(std::move(base)), stride_(std::move(stride)) {}

  /// `nv` fields interleaved cell-major in one array.
  static FieldAccessor interleaved(double* data, int nv);

  int fields() const noexcept { return static_cast<int>(base_.size()); }
  double& operator()(int v, long cell) const noexcept { return base_[v][cell * stride_[v]]; }

 private:
  std::vector<double*> base_;
  std::vector<std::ptrdiff_t> stride_;
};

/// Six face slabs, each kGhostDepth cells deep across the face. Slab dims
/// are (x, y, z) extents with the face-normal extent equal to the depth;
/// entry (v, a, b, c) is stored at v + nv*(a + d0*(b + d1*c)).
class HaloBuffers {
 public:
  HaloBuffers() = default;
  HaloBuffers(const LocalBox& box, int nv);

  int fields() const noexcept { return nv_; }
  std::array<long, 3> dims(Face f) const noexcept { return dims_[static_cast<int>(f)]; }
  std::span<double> slab(Face f) noexcept { return slabs_[static_cast<int>(f)]; }
  std::span<const double> slab(Face f) const noexcept { return slabs_[static_cast<int>(f)]; }

  double& at(Face f, int v, long a, long b, long c) noexcept {
    const auto& d = dims_[static_cast<int>(f)];
    return slabs_[static_cast<int>(f)][v + nv_ * (a + d[0] * (b + d[1] * c))];
  }
  double at(Face f, int v, long a, long b, long c) const noexcept {
    const auto& d = dims_[static_cast<int>(f)];
    return slabs_[static_cast<int>(f)][v + nv_ * (a + d[0] * (b + d[1] * c))];
  }

  void fill(double value);

 private:
  int nv_ = 0;
  std::array<std::array<long, 3>, 6> dims_{};
  std::array<std::vector<double>, 6> slabs_;
};

enum class ExchangeStatus { pending, complete };

class HaloExchanger;

/// Handle for an in-flight halo exchange.
class PendingExchange {
 public:
  ExchangeStatus status() const noexcept { return status_; }

 private:
  friend class HaloExchanger;
  explicit PendingExchange(std::uint64_t id) : id_(id) {}
  std::uint64_t id_;
  ExchangeStatus status_ = ExchangeStatus::pending;
};

/// Fills ghost layers on a physical face from the owned cells: ghost depth
/// d takes the mirror cell d-1 inside the face. Neumann copies, Dirichlet
/// negates, reflecting negates only the face-normal momentum (field
/// momentum_field + axis; pass a negative value when there is none).
/// Periodic faces are a ProtocolError.
void apply_boundary(Face face, BoundaryCondition bc, const LocalBox& box,
                    const FieldAccessor& fields, HaloBuffers& halos, int momentum_field = 1);

/// Encodes a slab for the wire: face id (1 byte), field count (2 bytes),
/// slab dims (3 x 4 bytes), then the little-endian payload.
Bytes encode_slab(Face destination, int nv, const std::array<long, 3>& dims,
                  std::span<const double> payload);
/// Decodes into `out` after checking the header against the expectation.
void decode_slab(const Bytes& message, Face expected_face, int nv,
                 const std::array<long, 3>& dims, std::span<double> out);

/// Three-deep halo exchange for one task. Between begin() and finish() the
/// caller may compute on owned cells but must not read halo values.
class HaloExchanger {
 public:
  HaloExchanger(const Decomposition& decomposition, Collective& comm, int nv,
                int momentum_field = 1, Profiler* profiler = nullptr);

  const LocalBox& box() const noexcept { return box_; }
  const HaloBuffers& halos() const noexcept { return halos_; }
  HaloBuffers& halos() noexcept { return halos_; }
  const Decomposition& decomposition() const noexcept { return decomposition_; }

  /// Packs and posts the owned boundary layers to every neighbor. With
  /// `poison`, ghost storage is set to NaN until finish().
  PendingExchange begin(const FieldAccessor& fields, bool poison = false);

  /// Receives neighbor slabs, wraps self-periodic axes and applies physical
  /// boundary conditions. A second finish of the same handle, or finishing
  /// a stale handle, is a ProtocolError.
  void finish(PendingExchange& pending, const FieldAccessor& fields);

  /// Value of field v at local (i, j, k), where at most one index may lie
  /// in a ghost layer.
  double value(const FieldAccessor& fields, int v, long i, long j, long k) const noexcept {
    if (i < 0) return halos_.at(Face::x_lo, v, i + kGhostDepth, j, k);
    if (i >= box_.n[0]) return halos_.at(Face::x_hi, v, i - box_.n[0], j, k);
    if (j < 0) return halos_.at(Face::y_lo, v, i, j + kGhostDepth, k);
    if (j >= box_.n[1]) return halos_.at(Face::y_hi, v, i, j - box_.n[1], k);
    if (k < 0) return halos_.at(Face::z_lo, v, i, j, k + kGhostDepth);
    if (k >= box_.n[2]) return halos_.at(Face::z_hi, v, i, j, k - box_.n[2]);
    return fields(v, box_.index(i, j, k));
  }

 private:
  void pack(Face toward, const FieldAccessor& fields, std::vector<double>& out) const;
  void wrap_self(Face face, const FieldAccessor& fields);

  const Decomposition& decomposition_;
  Collective& comm_;
  int nv_;
  int momentum_field_;
  Profiler* profiler_;
  LocalBox box_;
  HaloBuffers halos_;
  std::array<std::optional<int>, 6> neighbors_{};
  std::uint64_t next_id_ = 1;
  std::uint64_t open_id_ = 0;
};

}  // namespace mrflow

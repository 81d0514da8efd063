// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrflow/halo.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <string>

#include "mrflow/error.hpp"

namespace mrflow {
namespace {

constexpr std::size_t kHeaderBytes = 1 + 2 + 3 * 4;

std::array<long, 3> slab_dims(const LocalBox& box, Face f) {
  auto d = box.n;
  d[face_axis(f)] = kGhostDepth;
  return d;
}

// Visits every slab entry of face `f`; `normal(a)` maps the slab's normal
// coordinate to the local cell index along that axis.
template <typename Normal, typename Visit>
void for_each_slab_cell(const LocalBox& box, Face f, Normal normal, Visit visit) {
  const int axis = face_axis(f);
  const auto d = slab_dims(box, f);
  for (long c = 0; c < d[2]; ++c) {
    for (long b = 0; b < d[1]; ++b) {
      for (long a = 0; a < d[0]; ++a) {
        std::array<long, 3> slab{a, b, c};
        std::array<long, 3> cell = slab;
        cell[axis] = normal(slab[axis]);
        visit(slab, box.index(cell[0], cell[1], cell[2]));
      }
    }
  }
}

}  // namespace

FieldAccessor FieldAccessor::interleaved(double* data, int nv) {
  std::vector<double*> base(static_cast<std::size_t>(nv));
  std::vector<std::ptrdiff_t> stride(static_cast<std::size_t>(nv), nv);
  for (int v = 0; v < nv; ++v) base[static_cast<std::size_t>(v)] = data + v;
  return FieldAccessor(std::move(base), std::move(stride));
}

HaloBuffers::HaloBuffers(const LocalBox& box, int nv) : nv_(nv) {
  for (Face f : kAllFaces) {
    const auto d = slab_dims(box, f);
    dims_[static_cast<int>(f)] = d;
    slabs_[static_cast<int>(f)].assign(static_cast<std::size_t>(nv * d[0] * d[1] * d[2]), 0.0);
  }
}

void HaloBuffers::fill(double value) {
  for (auto& s : slabs_) std::ranges::fill(s, value);
}

void apply_boundary(Face face, BoundaryCondition bc, const LocalBox& box,
                    const FieldAccessor& fields, HaloBuffers& halos, int momentum_field) {
  if (bc == BoundaryCondition::periodic) {
    throw ProtocolError("periodic faces are filled by the exchange, not apply_boundary");
  }
  const int axis = face_axis(face);
  const long n = box.n[axis];
  if (n < kGhostDepth) throw ConfigError("physical boundary needs at least 3 owned cells");
  const int nv = fields.fields();
  const int normal_momentum = momentum_field >= 0 ? momentum_field + axis : -1;
  // Mirror of ghost slab coordinate a.
  auto mirror = [&](long a) { return face_is_high(face) ? n - 1 - a : 2 - a; };
  for_each_slab_cell(box, face, mirror, [&](const std::array<long, 3>& s, long cell) {
    for (int v = 0; v < nv; ++v) {
      double value = fields(v, cell);
      const bool negate = bc == BoundaryCondition::dirichlet ||
                          (bc == BoundaryCondition::reflecting && v == normal_momentum);
      halos.at(face, v, s[0], s[1], s[2]) = negate ? -value : value;
    }
  });
}

Bytes encode_slab(Face destination, int nv, const std::array<long, 3>& dims,
                  std::span<const double> payload) {
  Bytes out(kHeaderBytes + payload.size_bytes());
  auto* p = reinterpret_cast<unsigned char*>(out.data());
  p[0] = static_cast<unsigned char>(destination);
  const auto count = static_cast<std::uint16_t>(nv);
  std::memcpy(p + 1, &count, 2);
  for (int a = 0; a < 3; ++a) {
    const auto d = static_cast<std::uint32_t>(dims[a]);
    std::memcpy(p + 3 + 4 * a, &d, 4);
  }
  std::memcpy(p + kHeaderBytes, payload.data(), payload.size_bytes());
  return out;
}

void decode_slab(const Bytes& message, Face expected_face, int nv, const std::array<long, 3>& dims,
                 std::span<double> out) {
  if (message.size() != kHeaderBytes + out.size_bytes()) {
    throw CommunicationError("halo message has the wrong size");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(message.data());
  std::uint16_t count = 0;
  std::memcpy(&count, p + 1, 2);
  bool ok = p[0] == static_cast<unsigned char>(expected_face) && count == nv;
  for (int a = 0; a < 3; ++a) {
    std::uint32_t d = 0;
    std::memcpy(&d, p + 3 + 4 * a, 4);
    ok = ok && d == dims[a];
  }
  if (!ok) throw CommunicationError("halo message header does not match the receiving face");
  std::memcpy(out.data(), p + kHeaderBytes, out.size_bytes());
}

HaloExchanger::HaloExchanger(const Decomposition& decomposition, Collective& comm, int nv,
                             int momentum_field, Profiler* profiler)
    : decomposition_(decomposition),
      comm_(comm),
      nv_(nv),
      momentum_field_(momentum_field),
      profiler_(profiler) {
  if (decomposition.tasks() != comm.size()) {
    throw ConfigError("decomposition has " + std::to_string(decomposition.tasks()) +
                      " tasks but the group has " + std::to_string(comm.size()));
  }
  const auto ext = decomposition.extents_of(comm.rank());
  for (int a = 0; a < 3; ++a) {
    box_.n[a] = ext[a].size();
    box_.offset[a] = ext[a].begin;
  }
  halos_ = HaloBuffers(box_, nv);
  for (Face f : kAllFaces) neighbors_[static_cast<int>(f)] = decomposition.neighbor(comm.rank(), f);
}

void HaloExchanger::pack(Face toward, const FieldAccessor& fields, std::vector<double>& out) const {
  const long n = box_.n[face_axis(toward)];
  const auto d = slab_dims(box_, toward);
  out.resize(static_cast<std::size_t>(nv_ * d[0] * d[1] * d[2]));
  auto source = [&](long a) { return face_is_high(toward) ? n - kGhostDepth + a : a; };
  for_each_slab_cell(box_, toward, source, [&](const std::array<long, 3>& s, long cell) {
    double* dst = out.data() + nv_ * (s[0] + d[0] * (s[1] + d[1] * s[2]));
    for (int v = 0; v < nv_; ++v) dst[v] = fields(v, cell);
  });
}

void HaloExchanger::wrap_self(Face face, const FieldAccessor& fields) {
  const long n = box_.n[face_axis(face)];
  auto source = [&](long a) {
    const long ghost = face_is_high(face) ? n + a : a - kGhostDepth;
    return ((ghost % n) + n) % n;
  };
  for_each_slab_cell(box_, face, source, [&](const std::array<long, 3>& s, long cell) {
    for (int v = 0; v < nv_; ++v) halos_.at(face, v, s[0], s[1], s[2]) = fields(v, cell);
  });
}

PendingExchange HaloExchanger::begin(const FieldAccessor& fields, bool poison) {
  ScopedRegion timer(profiler_, Region::mpi);
  if (fields.fields() != nv_) throw ConformanceError("field count does not match the exchanger");
  if (open_id_ != 0) throw ProtocolError("previous halo exchange was not finished");
  if (poison) halos_.fill(std::numeric_limits<double>::quiet_NaN());
  std::vector<double> buffer;
  for (Face f : kAllFaces) {
    const auto& nb = neighbors_[static_cast<int>(f)];
    if (!nb || *nb == comm_.rank()) continue;
    pack(f, fields, buffer);
    const Face destination = opposite(f);
    comm_.send(*nb, static_cast<int>(destination),
               encode_slab(destination, nv_, slab_dims(box_, f), buffer));
  }
  open_id_ = next_id_++;
  return PendingExchange(open_id_);
}

void HaloExchanger::finish(PendingExchange& pending, const FieldAccessor& fields) {
  ScopedRegion timer(profiler_, Region::mpi);
  if (pending.status_ == ExchangeStatus::complete) throw ProtocolError("halo exchange already finished");
  if (pending.id_ != open_id_) throw ProtocolError("stale halo exchange handle");
  for (Face f : kAllFaces) {
    const auto& nb = neighbors_[static_cast<int>(f)];
    if (!nb) {
      apply_boundary(f, decomposition_.boundary(f), box_, fields, halos_, momentum_field_);
    } else if (*nb == comm_.rank()) {
      wrap_self(f, fields);
    } else {
      const Bytes msg = comm_.recv(*nb, static_cast<int>(f));
      decode_slab(msg, f, nv_, halos_.dims(f), halos_.slab(f));
    }
  }
  pending.status_ = ExchangeStatus::complete;
  open_id_ = 0;
}

}  // namespace mrflow

// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrflow/euler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mrflow/error.hpp"
#include "mrflow/simd.hpp"

namespace mrflow {

GasConstants GasConstants::from_gamma(double gamma, double gas_constant) {
  if (!(gamma > 1.0)) throw ConfigError("gamma must exceed 1");
  return {gas_constant, gas_constant / (gamma - 1.0), gamma};
}

double pressure(double rho, double mx, double my, double mz, double et, const GasConstants& gas) {
  if (!(rho > 0.0)) throw DomainError("nonpositive density " + std::to_string(rho));
  const double internal = et - (mx * mx + my * my + mz * mz) / (2.0 * rho);
  if (!(internal > 0.0)) throw DomainError("nonpositive internal energy " + std::to_string(internal));
  return (gas.gamma - 1.0) * internal;
}

double pressure_from_temperature(double rho, double temperature, const GasConstants& gas) {
  return rho * gas.gas_constant * temperature;
}

double sound_speed(double rho, double p, const GasConstants& gas) {
  if (!(rho > 0.0) || !(p > 0.0)) throw DomainError("sound speed needs positive density and pressure");
  return std::sqrt(gas.gamma * p / rho);
}

double cell_flux(int axis, const double* w, int nv, const GasConstants& gas, double* flux) {
  const double rho = w[field::rho];
  const double p = pressure(rho, w[field::mx], w[field::my], w[field::mz], w[field::et], gas);
  const double vel = w[field::mx + axis] / rho;
  flux[field::rho] = w[field::mx + axis];
  for (int a = 0; a < 3; ++a) flux[field::mx + a] = w[field::mx + a] * vel;
  flux[field::mx + axis] += p;
  flux[field::et] = (w[field::et] + p) * vel;
  for (int v = field::chem; v < nv; ++v) flux[v] = w[v] * vel;
  return std::fabs(vel) + sound_speed(rho, p, gas);
}

void weno5_face_flux(std::span<const double> w, std::span<const double> f, double lambda, int nv,
                     std::span<double> out) {
  const auto n = static_cast<std::size_t>(nv);
  if (w.size() < 6 * n || f.size() < 6 * n || out.size() < n) {
    throw ConformanceError("stencil buffers must hold 6 x nv values");
  }
  simd::weno_kernels().face_flux(w.data(), f.data(), lambda, n, out.data());
}

void weno5_face_flux(std::span<const double> w, int axis, int nv, const GasConstants& gas,
                     std::span<double> out) {
  std::vector<double> f(6 * static_cast<std::size_t>(nv));
  double lambda = 0.0;
  for (int p = 0; p < 6; ++p) {
    lambda = std::max(lambda, cell_flux(axis, w.data() + p * nv, nv, gas, f.data() + p * nv));
  }
  weno5_face_flux(w, f, lambda, nv, out);
}

// ---------------------------------------------------------------------------

EulerSolver::EulerSolver(const Decomposition& decomposition, Collective& comm, GasConstants gas,
                         Profiler* profiler)
    : decomposition_(decomposition),
      gas_(gas),
      profiler_(profiler),
      exchanger_(decomposition, comm, kFieldsPerCell, field::mx, profiler) {
  const auto& n = exchanger_.box().n;
  for (int a = 0; a < 3; ++a) {
    const long faces = (n[a] + 1) * (exchanger_.box().cells() / n[a]);
    face_flux_[a].assign(static_cast<std::size_t>(faces * kFieldsPerCell), 0.0);
  }
  const long longest = std::max({n[0], n[1], n[2]});
  line_w_.resize(static_cast<std::size_t>(longest * kFieldsPerCell));
  line_f_.resize(line_w_.size());
  line_speed_.resize(static_cast<std::size_t>(longest));
}

std::array<long, 3> EulerSolver::cell_at(int axis, long pos, long j, long k) const noexcept {
  switch (axis) {
    case 0:
      return {pos, j, k};
    case 1:
      return {j, pos, k};
    default:
      return {j, k, pos};
  }
}

long EulerSolver::face_index(int axis, long face, long j, long k) const noexcept {
  const auto& n = exchanger_.box().n;
  const long t1 = axis == 0 ? n[1] : n[0];
  return face + (n[axis] + 1) * (j + t1 * k);
}

void EulerSolver::pack_interior(const FieldAccessor& fields, int axis, long face, long j, long k,
                                StencilBuffer& out) const {
  const long n = exchanger_.box().n[axis];
  if (face < 3 || face + 2 >= n) throw ProtocolError("face stencil leaves the owned cells");
  out.resize(6 * kFieldsPerCell);
  for (int p = 0; p < 6; ++p) {
    const auto c = cell_at(axis, face - 3 + p, j, k);
    const long cell = exchanger_.box().index(c[0], c[1], c[2]);
    for (int v = 0; v < kFieldsPerCell; ++v) out[p * kFieldsPerCell + v] = fields(v, cell);
  }
}

void EulerSolver::pack_boundary(const FieldAccessor& fields, int axis, long face, long j, long k,
                                StencilBuffer& out) const {
  out.resize(6 * kFieldsPerCell);
  for (int p = 0; p < 6; ++p) {
    const auto c = cell_at(axis, face - 3 + p, j, k);
    for (int v = 0; v < kFieldsPerCell; ++v) {
      out[p * kFieldsPerCell + v] = exchanger_.value(fields, v, c[0], c[1], c[2]);
    }
  }
}

void EulerSolver::interior_faces(int axis, const FieldAccessor& fields) {
  const auto& box = exchanger_.box();
  const long n = box.n[axis];
  if (n < 6) return;
  const long t1 = axis == 0 ? box.n[1] : box.n[0];
  const long t2 = axis == 2 ? box.n[1] : box.n[2];
  const auto& kernel = simd::weno_kernels();
  constexpr int nv = kFieldsPerCell;
  auto& faces = face_flux_[axis];
  for (long k = 0; k < t2; ++k) {
    for (long j = 0; j < t1; ++j) {
      {
        ScopedRegion timer(profiler_, Region::packing);
        for (long p = 0; p < n; ++p) {
          const auto c = cell_at(axis, p, j, k);
          const long cell = box.index(c[0], c[1], c[2]);
          double* dst = line_w_.data() + p * nv;
          for (int v = 0; v < nv; ++v) dst[v] = fields(v, cell);
        }
      }
      ScopedRegion timer(profiler_, Region::weno);
      for (long p = 0; p < n; ++p) {
        line_speed_[p] = cell_flux(axis, line_w_.data() + p * nv, nv, gas_, line_f_.data() + p * nv);
      }
      for (long fi = 3; fi <= n - 3; ++fi) {
        const double* speed = line_speed_.data() + (fi - 3);
        const double lambda = std::max({speed[0], speed[1], speed[2], speed[3], speed[4], speed[5]});
        kernel.face_flux(line_w_.data() + (fi - 3) * nv, line_f_.data() + (fi - 3) * nv, lambda, nv,
                         faces.data() + face_index(axis, fi, j, k) * nv);
      }
    }
  }
}

void EulerSolver::boundary_faces(int axis, const FieldAccessor& fields) {
  const auto& box = exchanger_.box();
  const long n = box.n[axis];
  const long t1 = axis == 0 ? box.n[1] : box.n[0];
  const long t2 = axis == 2 ? box.n[1] : box.n[2];
  const auto& kernel = simd::weno_kernels();
  constexpr int nv = kFieldsPerCell;
  auto& faces = face_flux_[axis];
  StencilBuffer w;
  std::vector<double> f(6 * nv);
  for (long k = 0; k < t2; ++k) {
    for (long j = 0; j < t1; ++j) {
      for (long fi = 0; fi <= n; ++fi) {
        if (fi >= 3 && fi <= n - 3) continue;
        {
          ScopedRegion timer(profiler_, Region::packing);
          pack_boundary(fields, axis, fi, j, k, w);
        }
        ScopedRegion timer(profiler_, Region::weno);
        double lambda = 0.0;
        for (int p = 0; p < 6; ++p) {
          lambda = std::max(lambda, cell_flux(axis, w.data() + p * nv, nv, gas_, f.data() + p * nv));
        }
        kernel.face_flux(w.data(), f.data(), lambda, nv, faces.data() + face_index(axis, fi, j, k) * nv);
      }
    }
  }
}

void EulerSolver::divergence(double t, const FieldAccessor& out) {
  const auto& box = exchanger_.box();
  const auto& grid = decomposition_.grid();
  const double inv[3] = {1.0 / grid.spacing(0), 1.0 / grid.spacing(1), 1.0 / grid.spacing(2)};
  constexpr int nv = kFieldsPerCell;
  double g[nv];
  for (long k = 0; k < box.n[2]; ++k) {
    for (long j = 0; j < box.n[1]; ++j) {
      for (long i = 0; i < box.n[0]; ++i) {
        const long cell = box.index(i, j, k);
        const double* fx = face_flux_[0].data() + face_index(0, i, j, k) * nv;
        const double* fy = face_flux_[1].data() + face_index(1, j, i, k) * nv;
        const double* fz = face_flux_[2].data() + face_index(2, k, i, j) * nv;
        for (int v = 0; v < nv; ++v) {
          const double dx = (fx[nv + v] - fx[v]) * inv[0];
          const double dy = (fy[nv + v] - fy[v]) * inv[1];
          const double dz = (fz[nv + v] - fz[v]) * inv[2];
          out(v, cell) = -(dx + dy + dz);
        }
        if (forcing_) {
          const std::array<double, 3> x{grid.center(0, box.offset[0] + i),
                                        grid.center(1, box.offset[1] + j),
                                        grid.center(2, box.offset[2] + k)};
          std::fill(g, g + nv, 0.0);
          forcing_(t, x, g);
          for (int v = 0; v < nv; ++v) out(v, cell) += g[v];
        }
      }
    }
  }
}

void EulerSolver::rhs(double t, const ManyVector& w, ManyVector& out) {
  ScopedRegion fslow(profiler_, Region::fslow);
  ScopedRegion euler(profiler_, Region::euler);
  const FieldAccessor in = state_fields(w);
  const FieldAccessor dst = state_fields(out);
  if (state_cells(w) != exchanger_.box().cells() || state_cells(out) != exchanger_.box().cells()) {
    throw ConformanceError("state does not match the local grid");
  }
  PendingExchange pending = exchanger_.begin(in, poison_);
  for (int axis = 0; axis < 3; ++axis) interior_faces(axis, in);
  exchanger_.finish(pending, in);
  for (int axis = 0; axis < 3; ++axis) boundary_faces(axis, in);
  divergence(t, dst);
}

}  // namespace mrflow

// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mrflow/halo.hpp"
#include "mrflow/profiling.hpp"
#include "mrflow/state.hpp"
#include "mrflow/vectors.hpp"

namespace mrflow {

/// Ideal-gas constants; gamma = 1 + R / c_v.
struct GasConstants {
  double gas_constant = 1.0;  // R
  double cv = 1.5;
  double gamma = 5.0 / 3.0;

  static GasConstants from_gamma(double gamma, double gas_constant = 1.0);
};

/// p = (gamma - 1)(e_t - |m|^2 / (2 rho)). DomainError unless rho > 0 and
/// the internal energy is positive.
double pressure(double rho, double mx, double my, double mz, double et, const GasConstants& gas);
/// p = rho R T form of the equation of state.
double pressure_from_temperature(double rho, double temperature, const GasConstants& gas);
/// c = sqrt(gamma p / rho).
double sound_speed(double rho, double p, const GasConstants& gas);

/// Flux of one cell along `axis` (0, 1, 2) for `nv` conserved values
/// [rho, m_x, m_y, m_z, e_t, c...]; returns |v_axis| + c.
double cell_flux(int axis, const double* w, int nv, const GasConstants& gas, double* flux);

/// Stencil of 6 cells x nv values, position major. Position p holds the
/// cell at face offset p - 3, so the face sits between positions 2 and 3.
using StencilBuffer = std::vector<double>;

/// WENO5 face flux from packed cell values and their fluxes, with local
/// Lax-Friedrichs splitting at wave speed `lambda`.
void weno5_face_flux(std::span<const double> w, std::span<const double> f, double lambda, int nv,
                     std::span<double> out);

/// As above, computing cell fluxes and lambda = max(|v_axis| + c) from the
/// stencil itself.
void weno5_face_flux(std::span<const double> w, int axis, int nv, const GasConstants& gas,
                     std::span<double> out);

/// Optional source term G(x, t), added cell by cell to the right-hand side.
using ForcingFn = std::function<void(double t, const std::array<double, 3>& x, double* g)>;

/// Slow right-hand side -div F(w) + G for one task: overlapped halo
/// exchange, line-batched WENO5 fluxes on interior faces, boundary faces
/// after the exchange completes, then the conservative divergence.
class EulerSolver {
 public:
  EulerSolver(const Decomposition& decomposition, Collective& comm, GasConstants gas,
              Profiler* profiler = nullptr);

  void set_forcing(ForcingFn forcing) { forcing_ = std::move(forcing); }
  /// Fill ghost storage with NaN between begin and finish of every exchange.
  void set_poison_halos(bool on) noexcept { poison_ = on; }

  void rhs(double t, const ManyVector& w, ManyVector& out);

  const LocalBox& box() const noexcept { return exchanger_.box(); }
  const GasConstants& gas() const noexcept { return gas_; }
  const HaloExchanger& exchanger() const noexcept { return exchanger_; }
  const Decomposition& decomposition() const noexcept { return decomposition_; }

  /// Interior packer: stencil for face `face` along `axis` at transverse
  /// position (j, k) from owned cells only.
  void pack_interior(const FieldAccessor& fields, int axis, long face, long j, long k,
                     StencilBuffer& out) const;
  /// Boundary packer: same stencil, reading ghosts where needed.
  void pack_boundary(const FieldAccessor& fields, int axis, long face, long j, long k,
                     StencilBuffer& out) const;

 private:
  // Cell (i, j, k) in local coordinates where `pos` runs along `axis` and
  // (j, k) are the transverse coordinates in increasing axis order.
  std::array<long, 3> cell_at(int axis, long pos, long j, long k) const noexcept;
  long face_index(int axis, long face, long j, long k) const noexcept;

  void interior_faces(int axis, const FieldAccessor& fields);
  void boundary_faces(int axis, const FieldAccessor& fields);
  void divergence(double t, const FieldAccessor& out);

  const Decomposition& decomposition_;
  GasConstants gas_;
  Profiler* profiler_;
  HaloExchanger exchanger_;
  ForcingFn forcing_;
  bool poison_ = false;
  std::array<std::vector<double>, 3> face_flux_;  // per axis, nv per face
  std::vector<double> line_w_;
  std::vector<double> line_f_;
  std::vector<double> line_speed_;
};

}  // namespace mrflow

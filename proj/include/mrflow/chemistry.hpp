// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mrflow/grid.hpp"
#include "mrflow/state.hpp"

namespace mrflow {

/// Chemistry slot order within a cell's chemistry block.
namespace species {
inline constexpr int H = 0;
inline constexpr int Hp = 1;    // H+
inline constexpr int Hm = 2;    // H-
inline constexpr int H2 = 3;
inline constexpr int H2p = 4;   // H2+
inline constexpr int He = 5;
inline constexpr int Hep = 6;   // He+
inline constexpr int Hepp = 7;  // He++
inline constexpr int e = 8;     // electrons
inline constexpr int eg = 9;    // gas internal energy
}  // namespace species

/// CGS scaling between dimensional and dimensionless values.
struct UnitSystem {
  double mass = 3e70;       // g
  double length = 3.0857e30;  // cm
  double time = 1e11;       // s

  double density() const noexcept { return mass / (length * length * length); }
  double velocity() const noexcept { return length / time; }
  double momentum() const noexcept { return density() * velocity(); }
  double energy() const noexcept { return density() * velocity() * velocity(); }

  /// Scale of each per-cell field (divide to nondimensionalize).
  std::array<double, kFieldsPerCell> field_scales() const noexcept;

  friend bool operator==(const UnitSystem&, const UnitSystem&) = default;
};

struct DerivedUnits {
  double density;
  double momentum;
  double energy;
};

DerivedUnits derived_units(double mass, double length, double time);

/// In-place conversions of a cell array of kFieldsPerCell values.
void nondimensionalize(std::span<double> cell, const UnitSystem& units);
void redimensionalize(std::span<double> cell, const UnitSystem& units);

/// In-place conversion of every cell of a state vector.
void nondimensionalize(ManyVector& state, const UnitSystem& units);
void redimensionalize(ManyVector& state, const UnitSystem& units);

// Initial conditions ----------------------------------------------------------

struct Clump {
  std::array<double, 3> center;
  double radius;
  double size;
};

/// Uniform draws: centers in the domain, radius in [3dx, 6dx], size in
/// [0, 5]. Generated from `seed` alone so every task builds the same list.
std::vector<Clump> generate_clumps(std::size_t count, std::uint64_t seed, const UniformGrid& grid);

struct InitialConditions {
  double rho0 = 1.67e-22;  // g/cm^3
  double T0 = 10.0;        // K
  double gamma = 5.0 / 3.0;
  double kb = 1.3806488e-16;
  double trace = 1e-40;     // ionized species fraction
  double h2_fraction = 1e-12;
  double helium_fraction = 0.24;

  friend bool operator==(const InitialConditions&, const InitialConditions&) = default;
};

/// rho0 (1 + 5 exp(-20 |x - xc|^2) + sum_i s_i exp(-2 (|x - x_i| / r_i)^2)),
/// positions in dimensionless domain coordinates.
double density_field(const std::array<double, 3>& x, const std::array<double, 3>& center,
                     std::span<const Clump> clumps, double rho0);

/// T0 (1 + 5 exp(-20 |x - xc|^2)).
double temperature_field(const std::array<double, 3>& x, const std::array<double, 3>& center,
                         double T0);

/// Chemistry slots (CGS) for local density rho and temperature T; the
/// energy slot holds the specific internal energy k_b T N / (rho (gamma-1)).
std::array<double, kSpecies> species_init(double rho, double temperature,
                                          const InitialConditions& ic);

/// Number density N for the given mass-species densities.
double number_density(const std::array<double, kSpecies>& chem);

// Reaction network --------------------------------------------------------------

struct SurrogateParams {
  double k1 = 1e2;
  double k2 = 1e4;
  double q = 1e-2;
  double e_ref = 1.0;

  friend bool operator==(const SurrogateParams&, const SurrogateParams&) = default;
};

/// Stiff molecular-hydrogen surrogate acting on one cell's fields:
///   R = k1 H^2 - k2 H2 (e_g / e_ref)
///   dH/dt = -2R, dH2/dt = 2R, de_g/dt = de_t/dt = q e_ref R / (H + H2).
/// All other fields are inert. H + H2 is conserved.
class SurrogateNetwork {
 public:
  explicit SurrogateNetwork(SurrogateParams params = {}) : params_(params) {}

  const SurrogateParams& params() const noexcept { return params_; }
  void set_reference_energy(double e_ref) noexcept { params_.e_ref = e_ref; }

  /// cell and dcell hold kFieldsPerCell values.
  void rhs(const double* cell, double* dcell) const noexcept;

  /// Dense cell block (row-major kFieldsPerCell^2), zero outside pattern().
  void jacobian(const double* cell, double* block) const noexcept;

  /// Nonzero (row, column) positions of the cell Jacobian.
  static std::span<const std::array<int, 2>> pattern() noexcept;

 private:
  SurrogateParams params_;
};

}  // namespace mrflow

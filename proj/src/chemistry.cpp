// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrflow/chemistry.hpp"

#include <cmath>
#include <random>

#include "mrflow/error.hpp"

namespace mrflow {

namespace {

constexpr double kAvogadroish = 5.988e23;
constexpr double kMassH = 1.00794;
constexpr double kMassH2 = 2.01588;
constexpr double kMassHe = 4.002602;

double distance_squared(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void apply_scales(std::span<double> cell, const UnitSystem& units, bool divide) {
  if (cell.size() != kFieldsPerCell) throw ConformanceError("cell must hold 15 values");
  const auto scales = units.field_scales();
  for (int v = 0; v < kFieldsPerCell; ++v) {
    cell[v] = divide ? cell[v] / scales[v] : cell[v] * scales[v];
  }
}

void apply_scales(ManyVector& state, const UnitSystem& units, bool divide) {
  const FieldAccessor fields = state_fields(state);
  const auto scales = units.field_scales();
  const long cells = state_cells(state);
  for (int v = 0; v < kFieldsPerCell; ++v) {
    for (long c = 0; c < cells; ++c) {
      double& x = fields(v, c);
      x = divide ? x / scales[v] : x * scales[v];
    }
  }
}

}  // namespace

std::array<double, kFieldsPerCell> UnitSystem::field_scales() const noexcept {
  std::array<double, kFieldsPerCell> s{};
  s[field::rho] = density();
  s[field::mx] = s[field::my] = s[field::mz] = momentum();
  s[field::et] = energy();
  for (int c = 0; c < kSpecies; ++c) s[field::chem + c] = density();
  // The chemistry energy slot is carried as internal energy per volume.
  s[field::chem + species::eg] = energy();
  return s;
}

DerivedUnits derived_units(double mass, double length, double time) {
  if (!(mass > 0.0) || !(length > 0.0) || !(time > 0.0)) {
    throw ConfigError("unit scales must be positive");
  }
  const UnitSystem u{mass, length, time};
  return {u.density(), u.momentum(), u.energy()};
}

void nondimensionalize(std::span<double> cell, const UnitSystem& units) {
  apply_scales(cell, units, true);
}
void redimensionalize(std::span<double> cell, const UnitSystem& units) {
  apply_scales(cell, units, false);
}
void nondimensionalize(ManyVector& state, const UnitSystem& units) {
  apply_scales(state, units, true);
}
void redimensionalize(ManyVector& state, const UnitSystem& units) {
  apply_scales(state, units, false);
}

std::vector<Clump> generate_clumps(std::size_t count, std::uint64_t seed, const UniformGrid& grid) {
  std::mt19937_64 rng(seed);
  const double dx = grid.spacing(0);
  std::vector<Clump> clumps(count);
  for (auto& c : clumps) {
    for (int a = 0; a < 3; ++a) {
      c.center[a] = grid.lower[a] + uniform01(rng) * (grid.upper[a] - grid.lower[a]);
    }
    c.radius = dx * (3.0 + 3.0 * uniform01(rng));
    c.size = 5.0 * uniform01(rng);
  }
  return clumps;
}

double density_field(const std::array<double, 3>& x, const std::array<double, 3>& center,
                     std::span<const Clump> clumps, double rho0) {
  double shape = 1.0 + 5.0 * std::exp(-20.0 * distance_squared(x, center));
  for (const auto& c : clumps) {
    const double r2 = distance_squared(x, c.center) / (c.radius * c.radius);
    shape += c.size * std::exp(-2.0 * r2);
  }
  return rho0 * shape;
}

double temperature_field(const std::array<double, 3>& x, const std::array<double, 3>& center,
                         double T0) {
  return T0 * (1.0 + 5.0 * std::exp(-20.0 * distance_squared(x, center)));
}

double number_density(const std::array<double, kSpecies>& chem) {
  using namespace species;
  return kAvogadroish * (chem[H2] / kMassH2 + chem[H2p] / kMassH2 + chem[Hp] / kMassH +
                         chem[Hm] / kMassH + chem[Hep] / kMassHe + chem[Hepp] / kMassHe +
                         chem[He] / kMassHe + chem[H] / kMassH);
}

std::array<double, kSpecies> species_init(double rho, double temperature,
                                          const InitialConditions& ic) {
  using namespace species;
  if (!(rho > 0.0) || !(temperature > 0.0)) {
    throw DomainError("initial density and temperature must be positive");
  }
  std::array<double, kSpecies> c{};
  c[H2] = ic.h2_fraction * rho;
  c[H2p] = c[Hp] = c[Hm] = c[Hep] = c[Hepp] = ic.trace * rho;
  c[He] = ic.helium_fraction * rho - c[Hep] - c[Hepp];
  c[H] = rho - (c[H2] + c[H2p] + c[Hp] + c[Hm] + c[Hep] + c[Hepp] + c[He]);
  c[e] = c[Hp] / kMassH + c[Hep] / kMassHe + 2.0 * c[Hepp] / kMassHe - c[Hm] / kMassH +
         c[H2p] / kMassH2;
  c[eg] = ic.kb * temperature * number_density(c) / (rho * (ic.gamma - 1.0));
  return c;
}

// ---------------------------------------------------------------------------

namespace {

constexpr int kRowH = field::chem + species::H;
constexpr int kRowH2 = field::chem + species::H2;
constexpr int kRowEg = field::chem + species::eg;
constexpr int kRowEt = field::et;

constexpr std::array<std::array<int, 2>, 12> kPattern{{
    {kRowEt, kRowH}, {kRowEt, kRowH2}, {kRowEt, kRowEg},
    {kRowH, kRowH}, {kRowH, kRowH2}, {kRowH, kRowEg},
    {kRowH2, kRowH}, {kRowH2, kRowH2}, {kRowH2, kRowEg},
    {kRowEg, kRowH}, {kRowEg, kRowH2}, {kRowEg, kRowEg},
}};

}  // namespace

std::span<const std::array<int, 2>> SurrogateNetwork::pattern() noexcept { return kPattern; }

void SurrogateNetwork::rhs(const double* cell, double* dcell) const noexcept {
  for (int v = 0; v < kFieldsPerCell; ++v) dcell[v] = 0.0;
  const double h = cell[kRowH];
  const double h2 = cell[kRowH2];
  const double theta = cell[kRowEg] / params_.e_ref;
  const double rate = params_.k1 * h * h - params_.k2 * h2 * theta;
  const double hydrogen = h + h2;
  dcell[kRowH] = -2.0 * rate;
  dcell[kRowH2] = 2.0 * rate;
  const double heat = hydrogen > 0.0 ? params_.q * params_.e_ref * rate / hydrogen : 0.0;
  dcell[kRowEg] = heat;
  dcell[kRowEt] = heat;
}

void SurrogateNetwork::jacobian(const double* cell, double* block) const noexcept {
  constexpr int n = kFieldsPerCell;
  for (int i = 0; i < n * n; ++i) block[i] = 0.0;
  const double h = cell[kRowH];
  const double h2 = cell[kRowH2];
  const double theta = cell[kRowEg] / params_.e_ref;
  const double rate = params_.k1 * h * h - params_.k2 * h2 * theta;
  const double dr[3] = {2.0 * params_.k1 * h, -params_.k2 * theta, -params_.k2 * h2 / params_.e_ref};
  const int cols[3] = {kRowH, kRowH2, kRowEg};
  const double hydrogen = h + h2;
  for (int j = 0; j < 3; ++j) {
    block[kRowH * n + cols[j]] = -2.0 * dr[j];
    block[kRowH2 * n + cols[j]] = 2.0 * dr[j];
    double dheat = 0.0;
    if (hydrogen > 0.0) {
      // d(rate / (H + H2)); the hydrogen total depends on H and H2 only.
      const double dhyd = j < 2 ? 1.0 : 0.0;
      dheat = params_.q * params_.e_ref * (dr[j] * hydrogen - rate * dhyd) / (hydrogen * hydrogen);
    }
    block[kRowEg * n + cols[j]] = dheat;
    block[kRowEt * n + cols[j]] = dheat;
  }
}

}  // namespace mrflow

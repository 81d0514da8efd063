// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrflow/simulation.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>

#include "mrflow/error.hpp"
#include "mrflow/euler.hpp"
#include "mrflow/exact_sum.hpp"
#include "mrflow/report.hpp"

namespace mrflow {

namespace {

constexpr int kH = field::chem + species::H;
constexpr int kH2 = field::chem + species::H2;
constexpr int kEg = field::chem + species::eg;
constexpr int kGatherTag = 1 << 20;

}  // namespace

ChemistryProblem::ChemistryProblem(long cells, SurrogateNetwork network, bool reactions,
                                   Profiler* profiler)
    : cells_(cells),
      network_(network),
      reactions_(reactions),
      profiler_(profiler),
      layout_(cells),
      pattern_(block_diagonal_pattern(cells, kFieldsPerCell, SurrogateNetwork::pattern())) {}

void ChemistryProblem::rhs(double, const ManyVector& y, ManyVector& f) {
  ScopedRegion timer(profiler_, Region::ffast);
  fill(0.0, f);
  if (!reactions_) return;
  const auto et_in = y.sub(field::et);
  const auto chem_in = y.sub(kFluidFields);
  auto et_out = f.sub(field::et);
  auto chem_out = f.sub(kFluidFields);
  double cell[kFieldsPerCell] = {};
  double dcell[kFieldsPerCell];
  for (long c = 0; c < cells_; ++c) {
    const double* in = chem_in.data() + c * kSpecies;
    cell[field::et] = et_in[c];
    cell[kH] = in[species::H];
    cell[kH2] = in[species::H2];
    cell[kEg] = in[species::eg];
    network_.rhs(cell, dcell);
    double* out = chem_out.data() + c * kSpecies;
    et_out[c] = dcell[field::et];
    out[species::H] = dcell[kH];
    out[species::H2] = dcell[kH2];
    out[species::eg] = dcell[kEg];
  }
}

void ChemistryProblem::jacobian(double, const ManyVector& y, CsrMatrix& j) {
  ScopedRegion timer(profiler_, Region::jfast);
  constexpr int n = kFieldsPerCell;
  const auto chem_in = y.sub(kFluidFields);
  double cell[n] = {};
  double block[n * n];
  for (long c = 0; c < cells_; ++c) {
    const double* in = chem_in.data() + c * kSpecies;
    cell[kH] = in[species::H];
    cell[kH2] = in[species::H2];
    cell[kEg] = in[species::eg];
    if (reactions_) {
      network_.jacobian(cell, block);
    } else {
      std::fill(block, block + n * n, 0.0);
    }
    if (c == singular_cell_) std::fill(block, block + n * n, std::numeric_limits<double>::quiet_NaN());
    for (int r = 0; r < n; ++r) {
      const long row = c * n + r;
      for (long p = j.row_offsets[row]; p < j.row_offsets[row + 1]; ++p) {
        j.values[p] = block[r * n + (j.columns[p] - c * n)];
      }
    }
  }
}

void synchronize_energy(ManyVector& state) {
  const long cells = state_cells(state);
  const auto rho = state.sub(field::rho);
  const auto mx = state.sub(field::mx);
  const auto my = state.sub(field::my);
  const auto mz = state.sub(field::mz);
  const auto et = state.sub(field::et);
  auto chem = state.sub(kFluidFields);
  for (long c = 0; c < cells; ++c) {
    const double kinetic = (mx[c] * mx[c] + my[c] * my[c] + mz[c] * mz[c]) / (2.0 * rho[c]);
    chem[c * kSpecies + species::eg] = et[c] - kinetic;
  }
}

std::vector<double> field_totals(const std::vector<std::vector<double>>& state) {
  std::vector<double> totals;
  for (const auto& f : state) {
    ExactSum s;
    for (double v : f) s.add(v);
    totals.push_back(s.value());
  }
  return totals;
}

namespace {

std::array<double, 3> cell_center(const UniformGrid& grid, long gi, long gj, long gk) {
  return {grid.center(0, gi), grid.center(1, gj), grid.center(2, gk)};
}

void initialize_primordial(const RunConfig& config, const Decomposition& decomp, const LocalBox& box,
                           ManyVector& state) {
  const UniformGrid& grid = decomp.grid();
  const auto clumps = generate_clumps(static_cast<std::size_t>(config.effective_clump_count()),
                                      config.seed, grid);
  std::array<double, 3> center{};
  for (int a = 0; a < 3; ++a) center[a] = 0.5 * (grid.lower[a] + grid.upper[a]);
  const FieldAccessor fields = state_fields(state);
  std::array<double, kFieldsPerCell> cell{};
  for (long k = 0; k < box.n[2]; ++k) {
    for (long j = 0; j < box.n[1]; ++j) {
      for (long i = 0; i < box.n[0]; ++i) {
        const auto x = cell_center(grid, box.offset[0] + i, box.offset[1] + j, box.offset[2] + k);
        const double rho = density_field(x, center, clumps, config.initial.rho0);
        const double temperature = temperature_field(x, center, config.initial.T0);
        const auto chem = species_init(rho, temperature, config.initial);
        cell.fill(0.0);
        cell[field::rho] = rho;
        cell[field::et] = rho * chem[species::eg];
        for (int s = 0; s < kSpecies; ++s) cell[field::chem + s] = chem[s];
        cell[kEg] = rho * chem[species::eg];  // per volume
        nondimensionalize(cell, config.units);
        const long c = box.index(i, j, k);
        for (int v = 0; v < kFieldsPerCell; ++v) fields(v, c) = cell[v];
      }
    }
  }
}

// Smooth periodic wave: rho = 1 + 0.2 sin(2 pi (x + y + z)), uniform
// velocity and unit pressure. Values are dimensionless already.
void initialize_density_wave(const RunConfig& config, const Decomposition& decomp,
                             const LocalBox& box, ManyVector& state) {
  const UniformGrid& grid = decomp.grid();
  const double gamma = config.initial.gamma;
  const std::array<double, 3> velocity{1.0, 0.5, 0.25};
  const FieldAccessor fields = state_fields(state);
  for (long k = 0; k < box.n[2]; ++k) {
    for (long j = 0; j < box.n[1]; ++j) {
      for (long i = 0; i < box.n[0]; ++i) {
        const auto x = cell_center(grid, box.offset[0] + i, box.offset[1] + j, box.offset[2] + k);
        const double rho = 1.0 + 0.2 * std::sin(2.0 * std::numbers::pi * (x[0] + x[1] + x[2]));
        const double internal = 1.0 / (gamma - 1.0);
        const long c = box.index(i, j, k);
        for (int v = 0; v < kFieldsPerCell; ++v) fields(v, c) = 0.0;
        fields(field::rho, c) = rho;
        double kinetic = 0.0;
        for (int a = 0; a < 3; ++a) {
          fields(field::mx + a, c) = rho * velocity[a];
          kinetic += 0.5 * rho * velocity[a] * velocity[a];
        }
        fields(field::et, c) = internal + kinetic;
        fields(kH, c) = 0.76 * rho;
        fields(field::chem + species::He, c) = 0.24 * rho;
        fields(kEg, c) = internal;
      }
    }
  }
}

Bytes pack_box(const ManyVector& state, long cells) {
  Bytes out(static_cast<std::size_t>(cells) * kFieldsPerCell * sizeof(double));
  const FieldAccessor fields = state_fields(state);
  std::size_t pos = 0;
  for (int v = 0; v < kFieldsPerCell; ++v) {
    for (long c = 0; c < cells; ++c) {
      const double x = fields(v, c);
      std::memcpy(out.data() + pos, &x, sizeof(double));
      pos += sizeof(double);
    }
  }
  return out;
}

void unpack_box(const Bytes& data, const Decomposition& decomp, int rank,
                std::vector<std::vector<double>>& global) {
  const auto ext = decomp.extents_of(rank);
  const auto& cells = decomp.grid().cells;
  const long n0 = ext[0].size();
  const long n1 = ext[1].size();
  const long n2 = ext[2].size();
  if (data.size() != static_cast<std::size_t>(n0 * n1 * n2) * kFieldsPerCell * sizeof(double)) {
    throw CommunicationError("gathered block has the wrong size");
  }
  std::size_t pos = 0;
  for (int v = 0; v < kFieldsPerCell; ++v) {
    for (long k = 0; k < n2; ++k) {
      for (long j = 0; j < n1; ++j) {
        for (long i = 0; i < n0; ++i) {
          const long g = (ext[0].begin + i) + cells[0] * ((ext[1].begin + j) + cells[1] * (ext[2].begin + k));
          std::memcpy(&global[v][static_cast<std::size_t>(g)], data.data() + pos, sizeof(double));
          pos += sizeof(double);
        }
      }
    }
  }
}

void run_task(const RunConfig& config, Collective& comm, RunResult& result) {
  Profiler profiler;
  std::optional<Profiler::Scope> total;
  total.emplace(&profiler, Region::total);
  std::optional<Profiler::Scope> setup;
  setup.emplace(&profiler, Region::setup);

  const UniformGrid grid{config.lower, config.upper, config.cells};
  const Decomposition decomp(grid, config.tasks, config.boundaries);
  const auto ext = decomp.extents_of(comm.rank());
  LocalBox box;
  for (int a = 0; a < 3; ++a) {
    box.n[a] = ext[a].size();
    box.offset[a] = ext[a].begin;
  }
  ManyVector state = make_state(comm, box.cells(), config.vectors);
  if (config.problem == ProblemKind::primordial) {
    initialize_primordial(config, decomp, box, state);
  } else {
    initialize_density_wave(config, decomp, box, state);
  }

  SurrogateParams params = config.network;
  if (params.e_ref <= 0.0) {
    ExactSum local;
    const auto chem = state.sub(kFluidFields);
    for (long c = 0; c < box.cells(); ++c) local.add(chem[c * kSpecies + species::eg]);
    std::array<ExactSum, 1> sums{local};
    comm.allreduce(sums);
    params.e_ref = sums[0].value() / static_cast<double>(grid.cell_count());
  }
  result.reference_energy = params.e_ref;

  EulerSolver euler(decomp, comm, GasConstants::from_gamma(config.initial.gamma), &profiler);
  ChemistryProblem chemistry(box.cells(), SurrogateNetwork(params), config.reactions, &profiler);
  auto slow_rhs = [&euler](double t, const ManyVector& y, ManyVector& f) { euler.rhs(t, y, f); };
  setup.reset();

  TwoPhasePlan plan{config.t0, config.tf, config.h_slow, config.h_fast, config.transient};
  if (config.reactions) {
    FastSettings fast;
    fast.table = table_by_name(config.fast_table);
    fast.tol = config.tol;
    MriIntegrator mri(table_by_name(config.slow_table), slow_rhs, chemistry, fast, &profiler);
    mri.set_post_step([](double, ManyVector& y) { synchronize_energy(y); });
    result.phases = mri.evolve_two_phase(state, plan);
  } else {
    // No fast dynamics: the slow table alone, fixed steps.
    RkIntegrator erk(table_by_name(config.slow_table), slow_rhs, &profiler);
    ScopedRegion timer(&profiler, Region::fixed_step);
    ManyVector next = state.clone_empty();
    const auto n = static_cast<long>(std::ceil((config.tf - config.t0) / config.h_slow * (1.0 - 1e-12)));
    for (long i = 0; i < n; ++i) {
      const double t = config.t0 + static_cast<double>(i) * config.h_slow;
      const double h = i == n - 1 ? config.tf - t : config.h_slow;
      erk.step(t, state, h, next, config.tol);
      copy(next, state);
      synchronize_energy(state);
      profiler.count_slow_step();
    }
    result.phases.fixed.slow_steps = n;
  }
  total.reset();

  // Diagnostic output sits outside the total region.
  {
    ScopedRegion timer(&profiler, Region::io);
    if (comm.rank() != 0) {
      comm.send(0, kGatherTag, pack_box(state, box.cells()));
    } else {
      result.state.assign(kFieldsPerCell, std::vector<double>(static_cast<std::size_t>(grid.cell_count())));
      unpack_box(pack_box(state, box.cells()), decomp, 0, result.state);
      for (int r = 1; r < comm.size(); ++r) unpack_box(comm.recv(r, kGatherTag), decomp, r, result.state);
      if (!config.snapshot_path.empty()) {
        std::ofstream out(config.snapshot_path, std::ios::binary);
        if (!out) throw IoError("cannot write snapshot '" + config.snapshot_path + "'");
        std::vector<std::span<const double>> views(result.state.begin(), result.state.end());
        write_snapshot(out, views);
        if (!out) throw IoError("failed writing snapshot '" + config.snapshot_path + "'");
      }
    }
  }
  const ProfileSummary summary = aggregate(profiler, comm);
  if (comm.rank() == 0) {
    result.profile = summary;
    result.slow_steps = static_cast<long>(profiler.slow_steps());
    result.reduction_rounds = comm.counters().reduction_rounds;
    result.messages = comm.counters().messages_sent;
    if (!config.csv_path.empty()) {
      std::ofstream out(config.csv_path);
      if (!out) throw IoError("cannot write profile CSV '" + config.csv_path + "'");
      const std::string mode = config.vectors.fused_ops ? "fused" : "unfused";
      write_profile_csv(out, profile_records(summary, mode));
      if (!out) throw IoError("failed writing profile CSV '" + config.csv_path + "'");
    }
  }
}

}  // namespace

RunResult run_simulation(const RunConfig& config) {
  config.validate();
  RunResult result;
  run_tasks(config.tasks, [&](Collective& comm) { run_task(config, comm, result); });
  return result;
}

}  // namespace mrflow

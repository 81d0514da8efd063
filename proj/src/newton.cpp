// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrflow/newton.hpp"

#include <algorithm>
#include <array>

#include "mrflow/error.hpp"
#include "mrflow/state.hpp"

namespace mrflow {

void FlatBlockLayout::gather(const ManyVector& x, std::span<double> out) const {
  std::size_t pos = 0;
  for (std::size_t s = 0; s < x.subvector_count(); ++s) {
    for (double v : x.sub(s)) out[pos++] = v;
  }
}

void FlatBlockLayout::scatter(std::span<const double> in, ManyVector& x) const {
  std::size_t pos = 0;
  for (std::size_t s = 0; s < x.subvector_count(); ++s) {
    for (double& v : x.sub(s)) v = in[pos++];
  }
}

int CellBlockLayout::block_size() const { return kFieldsPerCell; }

void CellBlockLayout::gather(const ManyVector& x, std::span<double> out) const {
  const auto chem = x.sub(kFluidFields);
  for (int v = 0; v < kFluidFields; ++v) {
    const auto f = x.sub(static_cast<std::size_t>(v));
    for (long c = 0; c < cells_; ++c) out[c * kFieldsPerCell + v] = f[c];
  }
  for (long c = 0; c < cells_; ++c) {
    std::copy_n(chem.data() + c * kSpecies, kSpecies, out.data() + c * kFieldsPerCell + kFluidFields);
  }
}

void CellBlockLayout::scatter(std::span<const double> in, ManyVector& x) const {
  auto chem = x.sub(kFluidFields);
  for (int v = 0; v < kFluidFields; ++v) {
    auto f = x.sub(static_cast<std::size_t>(v));
    for (long c = 0; c < cells_; ++c) f[c] = in[c * kFieldsPerCell + v];
  }
  for (long c = 0; c < cells_; ++c) {
    std::copy_n(in.data() + c * kFieldsPerCell + kFluidFields, kSpecies, chem.data() + c * kSpecies);
  }
}

FunctionProblem::FunctionProblem(Rhs rhs, Jacobian jacobian, CsrMatrix pattern)
    : rhs_(std::move(rhs)),
      jacobian_(std::move(jacobian)),
      pattern_(std::move(pattern)),
      layout_(pattern_.blocks(), pattern_.block_size) {
  pattern_.validate();
}

void ForcedProblem::rhs(double t, const ManyVector& y, ManyVector& f) {
  inner_.rhs(t, y, f);
  if (forcing_ != nullptr) linear_sum(1.0, f, 1.0, *forcing_, f);
}

std::string_view to_string(NewtonStatus s) noexcept {
  switch (s) {
    case NewtonStatus::converged:
      return "converged";
    case NewtonStatus::max_iterations:
      return "maximum iterations reached";
    case NewtonStatus::diverged:
      return "diverged";
    case NewtonStatus::domain_error:
      return "right-hand side domain error";
    case NewtonStatus::singular:
      return "singular Newton matrix";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

NewtonSolver::NewtonSolver(ImplicitProblem& problem, NewtonConfig config, Profiler* profiler)
    : problem_(problem), config_(config), profiler_(profiler) {
  if (config_.max_iters < 1) throw ConfigError("Newton needs at least one iteration");
  jac_ = problem_.jacobian_pattern();
  newton_matrix_ = assemble_newton_matrix(jac_, 0.0);
  block_rhs_.resize(static_cast<std::size_t>(jac_.rows));
}

void NewtonSolver::ensure_workspace(const ManyVector& like) {
  if (f_.valid() && f_.layout().conforms(like.layout())) return;
  f_ = like.clone_empty();
  residual_ = like.clone_empty();
  delta_ = like.clone_empty();
  guess_ = like.clone_empty();
  if (like.local_length() != block_rhs_.size()) {
    throw ConformanceError("state length does not match the Jacobian");
  }
}

void NewtonSolver::setup(double t, double shift, const ManyVector& zeta) {
  Collective& comm = zeta.comm();
  const long before = comm.counters().total_events();
  problem_.jacobian(t, zeta, jac_);
  ++stats_.jacobian_evals;
  have_setup_ = false;
  {
    ScopedRegion timer(profiler_, Region::lsetup);
    update_newton_matrix(jac_, shift, newton_matrix_);
    lu_.factor(newton_matrix_);
  }
  ++stats_.setups;
  stats_.linear_comm_events += comm.counters().total_events() - before;
  have_setup_ = true;
  setup_shift_ = shift;
}

void NewtonSolver::linear_solve(ManyVector& x) {
  Collective& comm = x.comm();
  const long before = comm.counters().total_events();
  {
    ScopedRegion timer(profiler_, Region::lsolve);
    const auto& layout = problem_.layout();
    layout.gather(x, block_rhs_);
    lu_.solve(block_rhs_);
    layout.scatter(block_rhs_, x);
  }
  ++stats_.linear_solves;
  stats_.linear_comm_events += comm.counters().total_events() - before;
}

void NewtonSolver::residual(double t, double shift, const ManyVector& known,
                            const ManyVector& zeta) {
  problem_.rhs(t, zeta, f_);
  ++stats_.rhs_evals;
  // F = zeta - shift f - known
  linear_combination({1.0, -shift, -1.0}, {&zeta, &f_, &known}, residual_);
}

NewtonResult NewtonSolver::iterate(double t, double shift, const ManyVector& known,
                                   ManyVector& zeta, const ManyVector& weights, bool fresh) {
  NewtonResult result;
  try {
    if (fresh || !have_setup_ || setup_shift_ != shift) setup(t, shift, zeta);
    residual(t, shift, known, zeta);
    double rate = 1.0;
    double prev = 0.0;
    for (int k = 1; k <= config_.max_iters; ++k) {
      if (!config_.reuse_jacobian && k > 1) setup(t, shift, zeta);
      scale(-1.0, residual_, delta_);
      linear_solve(delta_);
      linear_sum(1.0, zeta, 1.0, delta_, zeta);
      residual(t, shift, known, zeta);
      ++stats_.iterations;
      result.iterations = k;
      const std::array<const ManyVector*, 2> xs{&delta_, &residual_};
      std::array<double, 2> norms{};
      wrms_norms(xs, weights, norms);
      const double step = norms[0];
      if (k > 1) rate = std::max(config_.rate_floor * rate, prev > 0.0 ? step / prev : 0.0);
      if (rate * step <= config_.conv_coef || norms[1] <= config_.conv_coef) {
        result.status = NewtonStatus::converged;
        return result;
      }
      if (k > 1 && step > config_.divergence_factor * prev) {
        result.status = NewtonStatus::diverged;
        return result;
      }
      prev = step;
    }
    result.status = NewtonStatus::max_iterations;
  } catch (const FactorizationError& e) {
    have_setup_ = false;
    result.status = NewtonStatus::singular;
    result.singular_block = e.block();
  } catch (const DomainError&) {
    result.status = NewtonStatus::domain_error;
  }
  return result;
}

NewtonResult NewtonSolver::solve(double t, double shift, const ManyVector& known, ManyVector& zeta,
                                 const ManyVector& weights) {
  ensure_workspace(zeta);
  ++stats_.solves;
  const bool reused = have_setup_ && setup_shift_ == shift && config_.reuse_jacobian;
  if (reused) copy(zeta, guess_);
  NewtonResult result = iterate(t, shift, known, zeta, weights, false);
  if (!result.converged() && reused && result.status != NewtonStatus::singular) {
    copy(guess_, zeta);
    const int first = result.iterations;
    result = iterate(t, shift, known, zeta, weights, true);
    result.iterations += first;
  }
  if (!result.converged()) ++stats_.failures;
  return result;
}

}  // namespace mrflow

// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrflow/mri.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "mrflow/error.hpp"

namespace mrflow {

MriCoupling::MriCoupling(const ButcherTable& slow) : slow_(slow), stages_(slow.stages) {
  slow_.validate();
  if (slow_.kind != TableKind::explicit_rk) throw ConfigError("slow table must be explicit");
  const auto s = static_cast<std::size_t>(stages_);
  A_.assign((s + 1) * s, 0.0);
  for (int i = 0; i < stages_; ++i) {
    for (int j = 0; j < stages_; ++j) A_[i * s + j] = slow_.a(i, j);
  }
  for (int j = 0; j < stages_; ++j) A_[s * s + j] = slow_.b[j];
  c_ = slow_.c;
  c_.push_back(1.0);
  for (std::size_t i = 1; i < c_.size(); ++i) {
    if (c_[i] < c_[i - 1]) throw ConfigError("slow abscissae must be nondecreasing");
  }
}

namespace {

// Telescoped coefficients (A_ij - A_{i-1,j}) * scale for j < i.
void forcing_terms(const MriCoupling& coupling, int i, double scale,
                   std::span<const ManyVector> slow_rhs, std::vector<double>& coeffs,
                   std::vector<const ManyVector*>& vecs) {
  coeffs.clear();
  vecs.clear();
  for (int j = 0; j < i; ++j) {
    const double d = coupling.a(i, j) - coupling.a(i - 1, j);
    if (d == 0.0) continue;
    coeffs.push_back(d * scale);
    vecs.push_back(&slow_rhs[static_cast<std::size_t>(j)]);
  }
}

}  // namespace

void mri_forcing(const MriCoupling& coupling, int i, std::span<const ManyVector> slow_rhs,
                 ManyVector& r) {
  if (i < 1 || i > coupling.slow_stages()) throw ConfigError("forcing stage out of range");
  if (slow_rhs.size() < static_cast<std::size_t>(i)) {
    throw ConformanceError("forcing needs the slow right-hand sides of earlier stages");
  }
  const double dc = coupling.c(i) - coupling.c(i - 1);
  if (dc == 0.0) throw DomainError("degenerate stage: equal abscissae");
  std::vector<double> coeffs;
  std::vector<const ManyVector*> vecs;
  forcing_terms(coupling, i, 1.0 / dc, slow_rhs, coeffs, vecs);
  if (vecs.empty()) {
    fill(0.0, r);
  } else {
    linear_combination(coeffs, vecs, r);
  }
}

void TwoPhasePlan::validate() const {
  if (!(h_slow > 0.0) || !(h_fast > 0.0)) throw ConfigError("step sizes must be positive");
  if (!(tf > t0)) throw ConfigError("final time must exceed the initial time");
  if (transient < 0.0) throw ConfigError("transient length must be nonnegative");
}

// ---------------------------------------------------------------------------

MriIntegrator::MriIntegrator(const ButcherTable& slow, RhsFn slow_rhs, ImplicitProblem& fast,
                             FastSettings settings, Profiler* profiler)
    : coupling_(slow),
      slow_rhs_(std::move(slow_rhs)),
      forced_(fast),
      settings_(std::move(settings)),
      fast_(settings_.table, forced_, settings_.newton, profiler),
      profiler_(profiler) {
  settings_.controller.validate();
}

void MriIntegrator::ensure_workspace(const ManyVector& like) {
  if (r_.valid() && r_.layout().conforms(like.layout())) return;
  f_slow_.clear();
  for (int i = 0; i < coupling_.slow_stages(); ++i) f_slow_.push_back(like.clone_empty());
  r_ = like.clone_empty();
}

void MriIntegrator::step(double t, ManyVector& y, double h, const FastMode& mode) {
  ensure_workspace(y);
  const int s = coupling_.slow_stages();
  std::vector<double> coeffs;
  std::vector<const ManyVector*> vecs;
  // y holds z_{i-1} on entry to iteration i and z_i on exit.
  for (int i = 1; i <= s; ++i) {
    const double t_prev = t + coupling_.c(i - 1) * h;
    const double t_next = t + coupling_.c(i) * h;
    slow_rhs_(t_prev, y, f_slow_[static_cast<std::size_t>(i - 1)]);
    ++slow_evals_;
    const double dc = coupling_.c(i) - coupling_.c(i - 1);
    if (dc == 0.0) {
      // Equal abscissae: explicit update, no fast solve.
      forcing_terms(coupling_, i, h, f_slow_, coeffs, vecs);
      coeffs.insert(coeffs.begin(), 1.0);
      vecs.insert(vecs.begin(), &y);
      linear_combination(coeffs, vecs, y);
      continue;
    }
    mri_forcing(coupling_, i, f_slow_, r_);
    forced_.set_forcing(&r_);
    fast_.reset();
    try {
      if (mode.adaptive) {
        ControllerParams ctrl = settings_.controller;
        ctrl.h_max = mode.h;
        fast_.evolve_adaptive(y, t_prev, t_next, settings_.tol, ctrl);
      } else {
        fast_.evolve_fixed(y, t_prev, t_next, mode.h, settings_.tol);
      }
    } catch (const SolverError& e) {
      forced_.set_forcing(nullptr);
      throw SolverError("slow stage " + std::to_string(i + 1) + " at t = " + std::to_string(t) +
                        ": " + e.what());
    }
    forced_.set_forcing(nullptr);
  }
  if (post_step_) post_step_(t + h, y);
}

long MriIntegrator::evolve(ManyVector& y, double t0, double tf, double h, const FastMode& mode) {
  if (!(h > 0.0)) throw ConfigError("slow step must be positive");
  if (!(tf > t0)) return 0;
  const auto n = static_cast<long>(std::ceil((tf - t0) / h * (1.0 - 1e-12)));
  for (long i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * h;
    const double hi = i == n - 1 ? tf - t : h;
    step(t, y, hi, mode);
    if (profiler_ != nullptr) profiler_->count_slow_step();
  }
  return n;
}

TwoPhaseStats MriIntegrator::evolve_two_phase(ManyVector& y, const TwoPhasePlan& plan) {
  plan.validate();
  TwoPhaseStats stats;
  auto run_phase = [&](PhaseStats& ps, Region region, double ta, double tb, FastMode mode) {
    const StepStats before = fast_.stats();
    const NewtonStats nbefore = fast_.newton()->stats();
    const auto start = std::chrono::steady_clock::now();
    {
      ScopedRegion timer(profiler_, region);
      ps.slow_steps = evolve(y, ta, tb, plan.h_slow, mode);
    }
    ps.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ps.fast_steps = fast_.stats().steps - before.steps;
    ps.fast_attempts = fast_.stats().attempts - before.attempts;
    ps.newton_iterations = fast_.newton()->stats().iterations - nbefore.iterations;
    ps.newton_failures = fast_.newton()->stats().failures - nbefore.failures;
  };
  const double te = plan.transient_end();
  if (te > plan.t0) run_phase(stats.transient, Region::transient, plan.t0, te, {true, plan.h_fast});
  if (plan.tf > te) run_phase(stats.fixed, Region::fixed_step, te, plan.tf, {false, plan.h_fast});
  return stats;
}

}  // namespace mrflow

// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <functional>
#include <span>
#include <vector>

#include "mrflow/ark.hpp"

namespace mrflow {

/// Slow explicit table padded with a final row equal to b, so stage s+1
/// lands on the step end (c = 1).
class MriCoupling {
 public:
  explicit MriCoupling(const ButcherTable& slow);

  int slow_stages() const noexcept { return stages_; }
  /// Rows 0..stages (the last one is the padded row).
  double a(int i, int j) const noexcept { return A_[static_cast<std::size_t>(i * stages_ + j)]; }
  double c(int i) const noexcept { return c_[static_cast<std::size_t>(i)]; }
  const ButcherTable& slow() const noexcept { return slow_; }

 private:
  ButcherTable slow_;
  int stages_;
  std::vector<double> A_;  // (stages + 1) x stages
  std::vector<double> c_;  // stages + 1
};

/// r = sum_{j<i} (A_ij - A_{i-1,j}) f_j / (c_i - c_{i-1}) for padded row
/// i in 1..stages. Throws DomainError when c_i == c_{i-1}.
void mri_forcing(const MriCoupling& coupling, int i, std::span<const ManyVector> slow_rhs,
                 ManyVector& r);

struct FastSettings {
  ButcherTable table = ark324_esdirk();
  Tolerances tol;
  ControllerParams controller;
  NewtonConfig newton;
};

/// How the fast IVPs are advanced during one slow step.
struct FastMode {
  bool adaptive = true;
  double h = 0.0;  // adaptive: maximum step (0 = none); fixed: the step size
};

struct TwoPhasePlan {
  double t0 = 0.0;
  double tf = 1.0;
  double h_slow = 0.1;
  double h_fast = 1e-4;
  double transient = 0.1;  // adaptive phase covers (t0, min(t0 + transient, tf)]

  double transient_end() const noexcept { return std::min(t0 + transient, tf); }
  void validate() const;
};

struct PhaseStats {
  long slow_steps = 0;
  long fast_steps = 0;
  long fast_attempts = 0;
  long newton_iterations = 0;
  long newton_failures = 0;
  double seconds = 0.0;
};

struct TwoPhaseStats {
  PhaseStats transient;
  PhaseStats fixed;
};

/// Multirate infinitesimal step integrator: explicit slow stages, each
/// realized by a fast IVP v' = f_fast(t, v) + r solved with an ESDIRK
/// method. Fast-solver state resets at every slow stage.
class MriIntegrator {
 public:
  MriIntegrator(const ButcherTable& slow, RhsFn slow_rhs, ImplicitProblem& fast,
                FastSettings settings = {}, Profiler* profiler = nullptr);

  /// Called after every slow step with the new time and state.
  void set_post_step(std::function<void(double, ManyVector&)> hook) { post_step_ = std::move(hook); }

  /// One slow step of size h from t; y is advanced in place.
  void step(double t, ManyVector& y, double h, const FastMode& mode);

  /// Transient phase with adaptive fast steps capped at h_fast (region l),
  /// then fixed fast steps of h_fast (region m).
  TwoPhaseStats evolve_two_phase(ManyVector& y, const TwoPhasePlan& plan);

  /// Slow steps over [t0, tf] (last truncated) with the given fast mode.
  long evolve(ManyVector& y, double t0, double tf, double h, const FastMode& mode);

  const MriCoupling& coupling() const noexcept { return coupling_; }
  const RkIntegrator& fast_integrator() const noexcept { return fast_; }
  long slow_rhs_evals() const noexcept { return slow_evals_; }

 private:
  void ensure_workspace(const ManyVector& like);

  MriCoupling coupling_;
  RhsFn slow_rhs_;
  ForcedProblem forced_;
  FastSettings settings_;
  RkIntegrator fast_;
  Profiler* profiler_;
  std::function<void(double, ManyVector&)> post_step_;
  std::vector<ManyVector> f_slow_;
  ManyVector r_;
  long slow_evals_ = 0;
};

}  // namespace mrflow

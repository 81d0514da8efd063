// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mrflow/butcher.hpp"
#include "mrflow/newton.hpp"
#include "mrflow/profiling.hpp"
#include "mrflow/vectors.hpp"

namespace mrflow {

struct Tolerances {
  double rtol = 1e-5;
  double atol = 1e-9;

  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct ControllerParams {
  double safety = 0.99;
  double bias = 2.0;
  double max_growth = 2.0;
  double min_reduction = 0.1;     // smallest factor applied after an error failure
  double newton_reduction = 0.25; // factor applied after a Newton failure
  double h_max = 0.0;             // 0: unlimited
  long max_steps = 5000;
  int max_newton_failures = 10;   // per step
  int max_error_failures = 7;     // per step

  /// Throws ConfigError for out-of-range values.
  void validate() const;
};

/// h * min(max_growth, safety (1 / (bias err))^(1/(p+1))), p the embedded
/// order, bounded below by min_reduction and clipped to h_max.
double controller_next_h(const ControllerParams& params, double h, double err, int embedded_order);

struct StepStats {
  long steps = 0;
  long attempts = 0;
  long error_failures = 0;
  long newton_failures = 0;
  long rhs_evals = 0;
  double h_last = 0.0;
  double h_min_used = 0.0;
  double h_max_used = 0.0;
};

using RhsFn = std::function<void(double, const ManyVector&, ManyVector&)>;

/// Explicit or diagonally implicit Runge-Kutta integrator over many-vectors.
/// Implicit stages go through a NewtonSolver on the supplied problem.
class RkIntegrator {
 public:
  /// Explicit tables.
  RkIntegrator(ButcherTable table, RhsFn rhs, Profiler* profiler = nullptr);
  /// Any table; the problem supplies f and its Jacobian.
  RkIntegrator(ButcherTable table, ImplicitProblem& problem, NewtonConfig newton = {},
               Profiler* profiler = nullptr);

  struct StepOutcome {
    bool ok = true;             // false: an implicit stage failed
    double error = 0.0;         // WRMS of the embedded difference (0 without embedding)
    NewtonResult newton;        // the failing stage, if any
    int failed_stage = -1;
  };

  /// One step of size h from (t, y) into y_next. Error weights come from y.
  StepOutcome step(double t, const ManyVector& y, double h, ManyVector& y_next,
                   const Tolerances& tol);

  /// Adaptive evolution of y from t0 to tf. h0 <= 0 picks
  /// min(h_max, tf - t0, 0.5 / ||f(t0, y0)||).
  void evolve_adaptive(ManyVector& y, double t0, double tf, const Tolerances& tol,
                       const ControllerParams& params, double h0 = 0.0);

  /// Fixed steps of size h (last one truncated to land on tf). Any Newton
  /// failure throws SolverError naming the step index.
  void evolve_fixed(ManyVector& y, double t0, double tf, double h, const Tolerances& tol);

  /// Drops Jacobian reuse and controller memory (new IVP).
  void reset();

  const ButcherTable& table() const noexcept { return table_; }
  const StepStats& stats() const noexcept { return stats_; }
  const NewtonSolver* newton() const noexcept { return newton_ ? &*newton_ : nullptr; }
  /// Accepted step sizes of the most recent evolve call.
  const std::vector<double>& step_history() const noexcept { return history_; }
  void set_record_history(bool on) noexcept { record_history_ = on; }

 private:
  StepOutcome step_impl(double t, const ManyVector& y, double h, ManyVector& y_next,
                        const Tolerances& tol, bool estimate);
  double initial_step(double t0, double tf, const ManyVector& y, const Tolerances& tol,
                      const ControllerParams& params);
  void evaluate(double t, const ManyVector& y, ManyVector& f);
  void ensure_workspace(const ManyVector& like);
  void accept(double h);

  ButcherTable table_;
  RhsFn rhs_;
  ImplicitProblem* problem_ = nullptr;
  std::optional<NewtonSolver> newton_;
  Profiler* profiler_;
  StepStats stats_;
  std::vector<ManyVector> k_;
  ManyVector known_, stage_, weights_, err_, y_trial_;
  std::vector<double> coeffs_;
  std::vector<const ManyVector*> vecs_;
  std::vector<double> history_;
  bool record_history_ = false;
};

}  // namespace mrflow

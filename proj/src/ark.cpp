// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrflow/ark.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mrflow/error.hpp"

namespace mrflow {

void ControllerParams::validate() const {
  if (!(safety > 0.0 && safety < 1.0)) throw ConfigError("controller safety must lie in (0, 1)");
  if (!(max_growth > 1.0)) throw ConfigError("controller growth limit must exceed 1");
  if (!(bias > 0.0)) throw ConfigError("controller bias must be positive");
  if (!(min_reduction > 0.0 && min_reduction < 1.0)) throw ConfigError("bad minimum reduction");
  if (!(newton_reduction > 0.0 && newton_reduction < 1.0)) throw ConfigError("bad Newton reduction");
  if (h_max < 0.0) throw ConfigError("maximum step must be nonnegative");
  if (max_steps < 1) throw ConfigError("maximum step count must be positive");
}

double controller_next_h(const ControllerParams& params, double h, double err, int embedded_order) {
  double factor = params.max_growth;
  if (err > 0.0) {
    const double k = 1.0 / (embedded_order + 1);
    factor = std::min(params.max_growth, params.safety * std::pow(1.0 / (params.bias * err), k));
  }
  factor = std::max(factor, params.min_reduction);
  double next = h * factor;
  if (params.h_max > 0.0) next = std::min(next, params.h_max);
  return next;
}

// ---------------------------------------------------------------------------

RkIntegrator::RkIntegrator(ButcherTable table, RhsFn rhs, Profiler* profiler)
    : table_(std::move(table)), rhs_(std::move(rhs)), profiler_(profiler) {
  table_.validate();
  if (table_.kind != TableKind::explicit_rk) {
    throw ConfigError("table " + table_.name + " needs an implicit problem");
  }
}

RkIntegrator::RkIntegrator(ButcherTable table, ImplicitProblem& problem, NewtonConfig newton,
                           Profiler* profiler)
    : table_(std::move(table)), problem_(&problem), profiler_(profiler) {
  table_.validate();
  newton_.emplace(problem, newton, profiler);
}

void RkIntegrator::reset() {
  if (newton_) newton_->reset();
}

void RkIntegrator::evaluate(double t, const ManyVector& y, ManyVector& f) {
  ++stats_.rhs_evals;
  if (problem_ != nullptr) {
    problem_->rhs(t, y, f);
  } else {
    rhs_(t, y, f);
  }
}

void RkIntegrator::ensure_workspace(const ManyVector& like) {
  if (known_.valid() && known_.layout().conforms(like.layout())) return;
  k_.clear();
  for (int i = 0; i < table_.stages; ++i) k_.push_back(like.clone_empty());
  known_ = like.clone_empty();
  stage_ = like.clone_empty();
  weights_ = like.clone_empty();
  err_ = like.clone_empty();
  y_trial_ = like.clone_empty();
}

RkIntegrator::StepOutcome RkIntegrator::step(double t, const ManyVector& y, double h,
                                             ManyVector& y_next, const Tolerances& tol) {
  ensure_workspace(y);
  return step_impl(t, y, h, y_next, tol, table_.has_embedding());
}

RkIntegrator::StepOutcome RkIntegrator::step_impl(double t, const ManyVector& y, double h,
                                                  ManyVector& y_next, const Tolerances& tol,
                                                  bool estimate) {
  StepOutcome out;
  const int s = table_.stages;
  // Weights serve the Newton convergence test and the error estimate.
  if (estimate || newton_) error_weights(y, tol.rtol, tol.atol, weights_);
  copy(y, stage_);
  for (int i = 0; i < s; ++i) {
    coeffs_.assign(1, 1.0);
    vecs_.assign(1, &y);
    for (int j = 0; j < i; ++j) {
      if (table_.a(i, j) == 0.0) continue;
      coeffs_.push_back(h * table_.a(i, j));
      vecs_.push_back(&k_[j]);
    }
    if (vecs_.size() == 1) {
      copy(y, known_);
    } else {
      linear_combination(coeffs_, vecs_, known_);
    }
    const double ti = t + table_.c[i] * h;
    const double aii = table_.a(i, i);
    if (aii == 0.0) {
      copy(known_, stage_);
      evaluate(ti, stage_, k_[i]);
      continue;
    }
    // Trivial predictor: the previous stage value is the initial guess.
    out.newton = newton_->solve(ti, h * aii, known_, stage_, weights_);
    if (!out.newton.converged()) {
      out.ok = false;
      out.failed_stage = i;
      return out;
    }
    copy(newton_->last_rhs(), k_[i]);
  }
  coeffs_.assign(1, 1.0);
  vecs_.assign(1, &y);
  for (int j = 0; j < s; ++j) {
    if (table_.b[j] == 0.0) continue;
    coeffs_.push_back(h * table_.b[j]);
    vecs_.push_back(&k_[j]);
  }
  linear_combination(coeffs_, vecs_, y_next);
  if (estimate && table_.has_embedding()) {
    coeffs_.clear();
    vecs_.clear();
    for (int j = 0; j < s; ++j) {
      const double d = table_.b[j] - table_.embedded[j];
      if (d == 0.0) continue;
      coeffs_.push_back(h * d);
      vecs_.push_back(&k_[j]);
    }
    if (vecs_.empty()) {
      out.error = 0.0;
    } else {
      linear_combination(coeffs_, vecs_, err_);
      out.error = wrms_norm(err_, weights_);
    }
  }
  return out;
}

double RkIntegrator::initial_step(double t0, double tf, const ManyVector& y, const Tolerances& tol,
                                  const ControllerParams& params) {
  const double span = tf - t0;
  error_weights(y, tol.rtol, tol.atol, weights_);
  evaluate(t0, y, k_[0]);
  const double norm = wrms_norm(k_[0], weights_);
  double h = norm > 0.0 ? 0.5 / norm : span;
  h = std::min(h, span);
  if (params.h_max > 0.0) h = std::min(h, params.h_max);
  return h;
}

void RkIntegrator::accept(double h) {
  ++stats_.steps;
  stats_.h_last = h;
  stats_.h_min_used = stats_.steps == 1 ? h : std::min(stats_.h_min_used, h);
  stats_.h_max_used = std::max(stats_.h_max_used, h);
  if (record_history_) history_.push_back(h);
}

void RkIntegrator::evolve_adaptive(ManyVector& y, double t0, double tf, const Tolerances& tol,
                                   const ControllerParams& params, double h0) {
  params.validate();
  if (!(tf > t0)) throw ConfigError("adaptive evolution needs tf > t0");
  if (!table_.has_embedding()) {
    throw ConfigError("table " + table_.name + " has no embedding for adaptive steps");
  }
  ensure_workspace(y);
  history_.clear();
  double h = h0 > 0.0 ? h0 : initial_step(t0, tf, y, tol, params);
  double t = t0;
  long steps = 0;
  while (t < tf) {
    if (steps >= params.max_steps) {
      throw SolverError("maximum of " + std::to_string(params.max_steps) +
                        " steps reached at t = " + std::to_string(t));
    }
    if (params.h_max > 0.0) h = std::min(h, params.h_max);
    int newton_fails = 0;
    int error_fails = 0;
    StepOutcome out;
    bool last = false;
    for (;;) {
      last = t + h >= tf || tf - (t + h) <= 1e-12 * std::max(1.0, std::fabs(tf));
      if (last) h = tf - t;
      if (!(h > 1e-15 * std::max(1.0, std::fabs(t)))) {
        throw SolverError("step size underflow at t = " + std::to_string(t));
      }
      ++stats_.attempts;
      out = step_impl(t, y, h, y_trial_, tol, true);
      if (!out.ok) {
        ++stats_.newton_failures;
        if (++newton_fails > params.max_newton_failures) {
          throw SolverError("Newton failed repeatedly at t = " + std::to_string(t) + " (" +
                            std::string(to_string(out.newton.status)) + ")");
        }
        h *= params.newton_reduction;
        continue;
      }
      if (out.error > 1.0) {
        ++stats_.error_failures;
        if (++error_fails > params.max_error_failures) {
          throw SolverError("error test failed repeatedly at t = " + std::to_string(t));
        }
        h = controller_next_h(params, h, out.error, table_.embedded_order);
        continue;
      }
      break;
    }
    copy(y_trial_, y);
    t = last ? tf : t + h;
    ++steps;
    accept(h);
    h = controller_next_h(params, h, out.error, table_.embedded_order);
  }
}

void RkIntegrator::evolve_fixed(ManyVector& y, double t0, double tf, double h,
                                const Tolerances& tol) {
  if (!(h > 0.0)) throw ConfigError("fixed step size must be positive");
  if (!(tf > t0)) throw ConfigError("fixed evolution needs tf > t0");
  ensure_workspace(y);
  history_.clear();
  const auto n = static_cast<long>(std::ceil((tf - t0) / h * (1.0 - 1e-12)));
  for (long i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * h;
    const double hi = i == n - 1 ? tf - t : h;
    ++stats_.attempts;
    const StepOutcome out = step_impl(t, y, hi, y_trial_, tol, false);
    if (!out.ok) {
      ++stats_.newton_failures;
      throw SolverError("fixed step " + std::to_string(i) + " at t = " + std::to_string(t) +
                        ", stage " + std::to_string(out.failed_stage) + ": " +
                        std::string(to_string(out.newton.status)));
    }
    copy(y_trial_, y);
    accept(hi);
  }
}

}  // namespace mrflow

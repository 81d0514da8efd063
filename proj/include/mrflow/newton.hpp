// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <string_view>

#include "mrflow/profiling.hpp"
#include "mrflow/sparse.hpp"
#include "mrflow/vectors.hpp"

namespace mrflow {

/// Maps a many-vector to the block-major order of a block-diagonal
/// Jacobian.
class BlockLayout {
 public:
  virtual ~BlockLayout() = default;
  virtual long blocks() const = 0;
  virtual int block_size() const = 0;
  virtual void gather(const ManyVector& x, std::span<double> out) const = 0;
  virtual void scatter(std::span<const double> in, ManyVector& x) const = 0;
};

/// Consecutive runs of `block_size` entries in flat (subvector-major) order.
class FlatBlockLayout final : public BlockLayout {
 public:
  FlatBlockLayout(long blocks, int block_size) : blocks_(blocks), bs_(block_size) {}
  long blocks() const override { return blocks_; }
  int block_size() const override { return bs_; }
  void gather(const ManyVector& x, std::span<double> out) const override;
  void scatter(std::span<const double> in, ManyVector& x) const override;

 private:
  long blocks_;
  int bs_;
};

/// One block per cell of a simulation state (all fields of the cell).
class CellBlockLayout final : public BlockLayout {
 public:
  explicit CellBlockLayout(long cells) : cells_(cells) {}
  long blocks() const override { return cells_; }
  int block_size() const override;
  void gather(const ManyVector& x, std::span<double> out) const override;
  void scatter(std::span<const double> in, ManyVector& x) const override;

 private:
  long cells_;
};

/// f(t, y) with a block-diagonal Jacobian.
class ImplicitProblem {
 public:
  virtual ~ImplicitProblem() = default;
  virtual void rhs(double t, const ManyVector& y, ManyVector& f) = 0;
  virtual const BlockLayout& layout() const = 0;
  /// Block-diagonal CSR pattern; jacobian() fills its values.
  virtual CsrMatrix jacobian_pattern() const = 0;
  virtual void jacobian(double t, const ManyVector& y, CsrMatrix& j) = 0;
};

/// ImplicitProblem from callables, for ODE systems without mesh structure.
class FunctionProblem final : public ImplicitProblem {
 public:
  using Rhs = std::function<void(double, const ManyVector&, ManyVector&)>;
  using Jacobian = std::function<void(double, const ManyVector&, CsrMatrix&)>;

  FunctionProblem(Rhs rhs, Jacobian jacobian, CsrMatrix pattern);

  void rhs(double t, const ManyVector& y, ManyVector& f) override { rhs_(t, y, f); }
  const BlockLayout& layout() const override { return layout_; }
  CsrMatrix jacobian_pattern() const override { return pattern_; }
  void jacobian(double t, const ManyVector& y, CsrMatrix& j) override { jacobian_(t, y, j); }

 private:
  Rhs rhs_;
  Jacobian jacobian_;
  CsrMatrix pattern_;
  FlatBlockLayout layout_;
};

/// Adds a constant vector to another problem's right-hand side; the
/// Jacobian is unchanged.
class ForcedProblem final : public ImplicitProblem {
 public:
  explicit ForcedProblem(ImplicitProblem& inner) : inner_(inner) {}
  void set_forcing(const ManyVector* r) noexcept { forcing_ = r; }

  void rhs(double t, const ManyVector& y, ManyVector& f) override;
  const BlockLayout& layout() const override { return inner_.layout(); }
  CsrMatrix jacobian_pattern() const override { return inner_.jacobian_pattern(); }
  void jacobian(double t, const ManyVector& y, CsrMatrix& j) override { inner_.jacobian(t, y, j); }

 private:
  ImplicitProblem& inner_;
  const ManyVector* forcing_ = nullptr;
};

struct NewtonConfig {
  int max_iters = 10;
  double conv_coef = 0.01;
  double rate_floor = 0.3;        // R >= rate_floor * previous R
  double divergence_factor = 2.0;
  bool reuse_jacobian = true;     // false: fresh Jacobian every iteration
};

enum class NewtonStatus { converged, max_iterations, diverged, domain_error, singular };
std::string_view to_string(NewtonStatus s) noexcept;

struct NewtonResult {
  NewtonStatus status = NewtonStatus::converged;
  int iterations = 0;
  long singular_block = -1;
  bool converged() const noexcept { return status == NewtonStatus::converged; }
};

struct NewtonStats {
  long solves = 0;
  long iterations = 0;
  long failures = 0;
  long rhs_evals = 0;
  long jacobian_evals = 0;
  long setups = 0;         // Newton matrix assembly + factorization
  long linear_solves = 0;
  long linear_comm_events = 0;  // transport events during setups and solves
};

/// Modified Newton iteration for zeta - shift f(t, zeta) = known.
class NewtonSolver {
 public:
  NewtonSolver(ImplicitProblem& problem, NewtonConfig config = {}, Profiler* profiler = nullptr);

  /// zeta holds the initial guess on entry and the iterate on return.
  /// Convergence: R ||delta|| <= conv_coef or ||F(zeta)|| <= conv_coef in
  /// the WRMS norm with `weights`; one reduction round per iteration. A
  /// failure with a reused Jacobian is retried once with a fresh one.
  NewtonResult solve(double t, double shift, const ManyVector& known, ManyVector& zeta,
                     const ManyVector& weights);

  /// f(t, zeta) at the returned iterate.
  const ManyVector& last_rhs() const noexcept { return f_; }

  /// Forget the Jacobian and factorization.
  void reset() noexcept { have_setup_ = false; }

  const NewtonConfig& config() const noexcept { return config_; }
  void set_config(const NewtonConfig& c) noexcept { config_ = c; }
  const NewtonStats& stats() const noexcept { return stats_; }
  const CsrMatrix& jacobian() const noexcept { return jac_; }

 private:
  void ensure_workspace(const ManyVector& like);
  void setup(double t, double shift, const ManyVector& zeta);
  void linear_solve(ManyVector& x);
  NewtonResult iterate(double t, double shift, const ManyVector& known, ManyVector& zeta,
                       const ManyVector& weights, bool fresh);
  void residual(double t, double shift, const ManyVector& known, const ManyVector& zeta);

  ImplicitProblem& problem_;
  NewtonConfig config_;
  Profiler* profiler_;
  NewtonStats stats_;
  CsrMatrix jac_;
  CsrMatrix newton_matrix_;
  BlockLu lu_;
  bool have_setup_ = false;
  double setup_shift_ = 0.0;
  ManyVector f_, residual_, delta_, guess_;
  std::vector<double> block_rhs_;
};

}  // namespace mrflow

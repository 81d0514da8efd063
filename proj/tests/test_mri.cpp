// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "mrflow/error.hpp"
#include "mrflow/mri.hpp"
#include "oracles/observed_order.hpp"

namespace mrflow {
namespace {

// y' = (ws + wf) J y with J the 2D rotation generator; the two parts commute.
struct Rotation {
  double ws, wf;
  FunctionProblem fast;
  Rotation(double slow, double fastw)
      : ws(slow),
        wf(fastw),
        fast([this](double, const ManyVector& y, ManyVector& f) { rotate(wf, y, f); },
             [this](double, const ManyVector&, CsrMatrix& j) {
               // Row-major 2x2 block: [[0, -wf], [wf, 0]].
               j.values = {0.0, -wf, wf, 0.0};
             },
             pattern()) {}

  static void rotate(double w, const ManyVector& y, ManyVector& f) {
    const double u = y.at(0), v = y.at(1);
    f.at(0) = -w * v;
    f.at(1) = w * u;
  }
  static CsrMatrix pattern() {
    const std::array<std::array<int, 2>, 4> full{{{0, 0}, {0, 1}, {1, 0}, {1, 1}}};
    return block_diagonal_pattern(1, 2, full);
  }
  RhsFn slow() const {
    return [w = ws](double, const ManyVector& y, ManyVector& f) { rotate(w, y, f); };
  }
};

double rotation_error(double h_slow, double tf) {
  SingleTask comm;
  Rotation rot(1.0, 10.0);
  FastSettings fs;
  fs.tol = {1e-12, 1e-14};
  MriIntegrator mri(kw3_slow(), rot.slow(), rot.fast, fs);
  auto y = ManyVector::serial(comm, 2);
  y.at(0) = 1.0;
  y.at(1) = 0.0;
  mri.evolve(y, 0.0, tf, h_slow, {false, h_slow / 1000.0});
  const double angle = (rot.ws + rot.wf) * tf;
  return std::hypot(y.at(0) - std::cos(angle), y.at(1) - std::sin(angle));
}

TEST(Coupling, PaddedRowIsTheWeights) {
  const MriCoupling c(kw3_slow());
  ASSERT_EQ(c.slow_stages(), 3);
  for (int j = 0; j < 3; ++j) EXPECT_EQ(c.a(3, j), kw3_slow().b[j]);
  EXPECT_EQ(c.c(3), 1.0);
  double row = 0.0;
  for (int j = 0; j < 3; ++j) row += c.a(3, j);
  EXPECT_NEAR(row, 1.0, 1e-15);
  EXPECT_THROW(MriCoupling{ark324_esdirk()}, ConfigError);
}

TEST(Forcing, ForwardEulerGivesTheSlowRhs) {
  ButcherTable euler{"euler", TableKind::explicit_rk, 1, {0.0}, {1.0}, {}, {0.0}, 1, 0};
  const MriCoupling c(euler);
  SingleTask comm;
  std::vector<ManyVector> f{ManyVector::serial(comm, 3)};
  f[0].at(0) = 1.0;
  f[0].at(1) = -2.0;
  f[0].at(2) = 0.5;
  auto r = f[0].clone_empty();
  mri_forcing(c, 1, f, r);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(r.at(i), f[0].at(i));
}

TEST(Forcing, MatchesDirectFormulaOnRandomTables) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  SingleTask comm;
  for (int trial = 0; trial < 20; ++trial) {
    // Random explicit 3-stage table with increasing abscissae.
    const double a10 = 0.3 * u(rng), a20 = 0.2 * u(rng), a21 = 0.4 * u(rng);
    const double b0 = 0.3 * u(rng), b1 = 0.3 * u(rng);
    ButcherTable t{"random", TableKind::explicit_rk, 3,
                   {0, 0, 0, a10, 0, 0, a20, a21, 0}, {b0, b1, 1.0 - b0 - b1}, {}, {0, a10, a20 + a21}, 1, 0};
    if (!(a20 + a21 > a10)) continue;
    const MriCoupling c(t);
    std::vector<ManyVector> f;
    for (int j = 0; j < 3; ++j) {
      f.push_back(ManyVector::serial(comm, 4));
      for (std::size_t k = 0; k < 4; ++k) f.back().at(k) = u(rng) - 0.5;
    }
    const std::array<std::array<double, 3>, 4> A{{{0, 0, 0}, {a10, 0, 0}, {a20, a21, 0}, {b0, b1, 1.0 - b0 - b1}}};
    const std::array<double, 4> cs{0, a10, a20 + a21, 1.0};
    auto r = f[0].clone_empty();
    for (int i = 1; i <= 3; ++i) {
      mri_forcing(c, i, f, r);
      for (std::size_t k = 0; k < 4; ++k) {
        double expect = 0.0;
        for (int j = 0; j < i; ++j) expect += (A[i][j] - A[i - 1][j]) * f[j].at(k);
        expect /= cs[i] - cs[i - 1];
        ASSERT_NEAR(r.at(k), expect, 1e-14 * (1 + std::fabs(expect)));
      }
    }
  }
}

TEST(Forcing, EqualAbscissaeAreDegenerate) {
  ButcherTable t{"repeat", TableKind::explicit_rk, 3,
                 {0, 0, 0, 0.5, 0, 0, 0.25, 0.25, 0}, {1.0 / 6, 1.0 / 6, 2.0 / 3}, {}, {0, 0.5, 0.5}, 2, 0};
  const MriCoupling c(t);
  SingleTask comm;
  std::vector<ManyVector> f(2, ManyVector::serial(comm, 1));
  auto r = f[0].clone_empty();
  EXPECT_THROW(mri_forcing(c, 2, f, r), DomainError);
}

// f^F == 0 problem.
FunctionProblem zero_fast(int n) {
  std::vector<std::array<int, 2>> none;
  return FunctionProblem([](double, const ManyVector&, ManyVector& f) { fill(0.0, f); },
                         [](double, const ManyVector&, CsrMatrix&) {}, block_diagonal_pattern(1, n, none));
}

void nonlinear_slow(double t, const ManyVector& y, ManyVector& f) {
  f.at(0) = -y.at(1) + 0.1 * std::sin(t);
  f.at(1) = y.at(0) - 0.3 * y.at(1) * y.at(1);
}

double ulp(double x) { return std::nextafter(std::fabs(x), INFINITY) - std::fabs(x); }

void check_slow_limit(const ButcherTable& slow) {
  SingleTask comm;
  auto fast = zero_fast(2);
  MriIntegrator mri(slow, nonlinear_slow, fast);
  RkIntegrator erk(slow, nonlinear_slow);
  auto a = ManyVector::serial(comm, 2);
  a.at(0) = 1.0;
  a.at(1) = 0.5;
  auto b = a.clone_empty();
  copy(a, b);
  auto next = a.clone_empty();
  const double h = 0.05;
  for (int n = 1; n <= 40; ++n) {
    const double t = (n - 1) * h;
    // One fast step per stage interval.
    mri.step(t, a, h, {false, h});
    erk.step(t, b, h, next, {});
    copy(next, b);
    // Rounding is measured at the magnitude of the state, so components
    // passing through zero are not held to a vanishing ulp.
    const double unit = ulp(max_norm(b));
    for (std::size_t i = 0; i < 2; ++i) {
      ASSERT_LE(std::fabs(a.at(i) - b.at(i)), 2.0 * n * unit) << slow.name << " step " << n;
    }
  }
}

TEST(Step, SlowLimitMatchesExplicitTable) { check_slow_limit(kw3_slow()); }

TEST(Step, DegenerateStagesUseTheExplicitUpdate) {
  ButcherTable t{"repeat", TableKind::explicit_rk, 3,
                 {0, 0, 0, 0.5, 0, 0, 0.25, 0.25, 0}, {1.0 / 6, 1.0 / 6, 2.0 / 3}, {}, {0, 0.5, 0.5}, 2, 0};
  check_slow_limit(t);
}

TEST(Step, ZeroSlowRhsIsAPureFastSolve) {
  SingleTask comm;
  Rotation rot(0.0, 3.0);
  MriIntegrator mri(kw3_slow(), [](double, const ManyVector&, ManyVector& f) { fill(0.0, f); }, rot.fast);
  auto a = ManyVector::serial(comm, 2);
  a.at(0) = 1.0;
  auto b = a.clone_empty();
  copy(a, b);
  const double h = 0.12, hf = 0.01;
  mri.step(0.0, a, h, {false, hf});
  RkIntegrator fast(ark324_esdirk(), rot.fast);
  const MriCoupling c(kw3_slow());
  for (int i = 1; i <= 3; ++i) {
    fast.reset();
    fast.evolve_fixed(b, c.c(i - 1) * h, c.c(i) * h, hf, {});
  }
  EXPECT_EQ(a.at(0), b.at(0));
  EXPECT_EQ(a.at(1), b.at(1));
}

TEST(Order, CommutingRotationIsThirdOrder) {
  std::vector<double> hs, errs;
  for (int k = 0; k < 5; ++k) {
    hs.push_back(0.2 / (1 << k));
    errs.push_back(rotation_error(hs.back(), 1.0));
  }
  const double p = oracle::observed_order(errs, hs);
  EXPECT_GE(p, 2.7);
  EXPECT_LE(p, 3.3);
}

TEST(TwoPhase, PlanArithmetic) {
  TwoPhasePlan short_run{0.0, 0.05, 0.01, 1e-5, 0.1};
  EXPECT_EQ(short_run.transient_end(), 0.05);
  TwoPhasePlan row1{0.0, 1.0, 0.1, 1e-4, 0.1};
  EXPECT_EQ(row1.transient_end(), 0.1);
  EXPECT_THROW((TwoPhasePlan{0.0, 0.0, 0.1, 1e-4, 0.1}.validate()), ConfigError);
}

TEST(TwoPhase, PhasesSplitAndProfileIdentity) {
  SingleTask comm;
  Rotation rot(1.0, 20.0);
  Profiler profiler;
  MriIntegrator mri(kw3_slow(), rot.slow(), rot.fast, {}, &profiler);
  auto y = ManyVector::serial(comm, 2);
  y.at(0) = 1.0;
  TwoPhaseStats stats;
  {
    ScopedRegion total(&profiler, Region::total);
    stats = mri.evolve_two_phase(y, {0.0, 0.5, 0.05, 5e-5, 0.1});
  }
  EXPECT_EQ(stats.transient.slow_steps, 2);
  EXPECT_EQ(stats.fixed.slow_steps, 8);
  EXPECT_GT(stats.transient.fast_steps, 0);
  EXPECT_GE(stats.fixed.fast_steps, 8 * 1000);
  EXPECT_EQ(profiler.slow_steps(), 10u);
  const double l = profiler.seconds(Region::transient), m = profiler.seconds(Region::fixed_step);
  const double n = profiler.seconds(Region::total);
  EXPECT_NEAR(l + m, n, 0.01 * n);

  // Short run: no fixed phase.
  auto z = ManyVector::serial(comm, 2);
  z.at(0) = 1.0;
  const auto s2 = mri.evolve_two_phase(z, {0.0, 0.05, 0.01, 1e-5, 0.1});
  EXPECT_EQ(s2.fixed.slow_steps, 0);
  EXPECT_EQ(s2.transient.slow_steps, 5);
}

TEST(TwoPhase, Deterministic) {
  std::array<std::array<double, 3>, 2> runs{};
  for (auto& out : runs) {
    SingleTask comm;
    Rotation rot(1.0, 50.0);
    MriIntegrator mri(kw3_slow(), rot.slow(), rot.fast);
    auto y = ManyVector::serial(comm, 2);
    y.at(0) = 1.0;
    const auto st = mri.evolve_two_phase(y, {0.0, 0.2, 0.02, 2e-5, 0.1});
    out = {y.at(0), static_cast<double>(st.transient.fast_steps), static_cast<double>(st.transient.newton_iterations)};
  }
  EXPECT_EQ(runs[0], runs[1]);
}

TEST(Step, FastFailureNamesTheStage) {
  SingleTask comm;
  const std::array<std::array<int, 2>, 1> one{{{0, 0}}};
  FunctionProblem bad([](double, const ManyVector& y, ManyVector& f) { f.at(0) = y.at(0); },
                      [](double, const ManyVector&, CsrMatrix& j) { j.values[0] = std::nan(""); },
                      block_diagonal_pattern(1, 1, one));
  MriIntegrator mri(kw3_slow(), [](double, const ManyVector&, ManyVector& f) { fill(1.0, f); }, bad);
  auto y = ManyVector::serial(comm, 1);
  try {
    mri.step(0.0, y, 0.1, {false, 0.01});
    FAIL() << "expected a solver error";
  } catch (const SolverError& e) {
    EXPECT_NE(std::string(e.what()).find("slow stage 2"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace mrflow

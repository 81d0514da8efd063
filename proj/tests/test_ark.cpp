// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "mrflow/ark.hpp"
#include "mrflow/butcher.hpp"
#include "mrflow/error.hpp"
#include "mrflow/simulation.hpp"
#include "oracles/observed_order.hpp"
#include "oracles/reference_solve.hpp"

namespace mrflow {
namespace {

constexpr double kLambda = -2.0;

// y' = lambda (y - sin t) + cos t, y(t) = sin t + y0 e^{lambda t}.
double exact(double t) { return std::sin(t) + std::exp(kLambda * t); }

FunctionProblem smooth_problem() {
  const std::array<std::array<int, 2>, 1> one{{{0, 0}}};
  return FunctionProblem(
      [](double t, const ManyVector& y, ManyVector& f) {
        f.at(0) = kLambda * (y.at(0) - std::sin(t)) + std::cos(t);
      },
      [](double, const ManyVector&, CsrMatrix& j) { j.values[0] = kLambda; },
      block_diagonal_pattern(1, 1, one));
}

double fixed_error(const ButcherTable& table, double h) {
  SingleTask comm;
  auto problem = smooth_problem();
  RkIntegrator rk(table, problem);
  auto y = ManyVector::serial(comm, 1);
  y.at(0) = 1.0;
  rk.evolve_fixed(y, 0.0, 1.0, h, {1e-12, 1e-14});
  return std::fabs(y.at(0) - exact(1.0));
}

double table_order(const ButcherTable& table) {
  std::vector<double> hs, errs;
  for (int k = 0; k < 5; ++k) {
    hs.push_back(0.1 / (1 << k));
    errs.push_back(fixed_error(table, hs.back()));
  }
  return oracle::observed_order(errs, hs);
}

TEST(Tables, ShippedTablesValidate) {
  for (const auto* name : {"ark324", "bs32", "rk4", "kw3"}) {
    const auto t = table_by_name(name);
    EXPECT_NO_THROW(t.validate()) << name;
    double sum = 0.0;
    for (double b : t.b) sum += b;
    EXPECT_NEAR(sum, 1.0, 1e-14);
    for (int i = 0; i < t.stages; ++i) {
      for (int j = i + 1; j < t.stages; ++j) EXPECT_EQ(t.a(i, j), 0.0) << name;
      if (t.kind == TableKind::explicit_rk) {
        EXPECT_EQ(t.a(i, i), 0.0) << name;
      }
    }
  }
  EXPECT_THROW(table_by_name("ark437"), ConfigError);
  EXPECT_EQ(ark324_esdirk().kind, TableKind::dirk);
  EXPECT_EQ(ark324_esdirk().a(0, 0), 0.0);
}

TEST(Tables, ValidationRejectsBadTables) {
  auto t = kw3_slow();
  t.b[0] += 1e-3;
  EXPECT_THROW(t.validate(), ConfigError);
  t = kw3_slow();
  t.c[1] = 0.5;
  EXPECT_THROW(t.validate(), ConfigError);
  t = kw3_slow();
  t.A[t.stages + 2] = 0.1;  // above the diagonal in row 1
  EXPECT_THROW(t.validate(), ConfigError);
}

TEST(Tables, KnownCoefficients) {
  const auto kw3 = kw3_slow();
  EXPECT_EQ(kw3.stages, 3);
  EXPECT_DOUBLE_EQ(kw3.a(1, 0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(kw3.a(2, 0), -3.0 / 16.0);
  EXPECT_DOUBLE_EQ(kw3.a(2, 1), 15.0 / 16.0);
  EXPECT_DOUBLE_EQ(kw3.b[2], 8.0 / 15.0);
  const auto dirk = ark324_esdirk();
  EXPECT_EQ(dirk.order, 3);
  EXPECT_EQ(dirk.embedded_order, 2);
  EXPECT_NEAR(dirk.a(1, 1), 1767732205903.0 / 4055673282236.0, 1e-16);
}

TEST(Order, EveryShippedTableWithinTolerance) {
  for (const auto* name : {"ark324", "bs32", "rk4", "kw3"}) {
    const auto table = table_by_name(name);
    const double p = table_order(table);
    EXPECT_NEAR(p, table.order, 0.3) << name;
  }
}

TEST(Order, QuadratureExactForTableOrder) {
  // y' = t^{p-1}, y(0) = 0: exact for an order-p table.
  for (const auto* name : {"bs32", "rk4", "kw3", "ark324"}) {
    const auto table = table_by_name(name);
    const int p = table.order;
    const std::array<std::array<int, 2>, 1> one{{{0, 0}}};
    FunctionProblem problem(
        [p](double t, const ManyVector&, ManyVector& f) { f.at(0) = std::pow(t, p - 1); },
        [](double, const ManyVector&, CsrMatrix& j) { j.values[0] = 0.0; }, block_diagonal_pattern(1, 1, one));
    SingleTask comm;
    RkIntegrator rk(table, problem);
    auto y = ManyVector::serial(comm, 1);
    rk.evolve_fixed(y, 0.0, 1.0, 0.25, {});
    EXPECT_NEAR(y.at(0), 1.0 / p, 1e-14) << name;
  }
}

TEST(Order, EmbeddedEstimateScaling) {
  const auto table = ark324_esdirk();
  std::vector<double> hs, ests;
  for (int k = 0; k < 5; ++k) {
    SingleTask comm;
    auto problem = smooth_problem();
    RkIntegrator rk(table, problem);
    auto y = ManyVector::serial(comm, 1);
    y.at(0) = 1.0;
    auto next = y.clone_empty();
    const double h = 0.1 / (1 << k);
    // Unit weights: the estimate is the raw embedded difference.
    const auto out = rk.step(0.0, y, h, next, {1e-300, 1.0});
    hs.push_back(h);
    ests.push_back(out.error);
  }
  EXPECT_NEAR(oracle::observed_order(ests, hs), table.embedded_order + 1, 0.3);
}

TEST(Steps, ZeroRhsIsIdentity) {
  SingleTask comm;
  for (const auto* name : {"bs32", "ark324", "rk4"}) {
    const std::array<std::array<int, 2>, 2> diag{{{0, 0}, {1, 1}}};
    FunctionProblem zero([](double, const ManyVector&, ManyVector& f) { fill(0.0, f); },
                         [](double, const ManyVector&, CsrMatrix& j) { std::fill(j.values.begin(), j.values.end(), 0.0); },
                         block_diagonal_pattern(1, 2, diag));
    RkIntegrator rk(table_by_name(name), zero);
    auto y = ManyVector::serial(comm, 2);
    y.at(0) = 1.5;
    y.at(1) = -2.0;
    auto next = y.clone_empty();
    const auto out = rk.step(0.0, y, 0.3, next, {});
    EXPECT_TRUE(out.ok);
    EXPECT_EQ(out.error, 0.0);
    EXPECT_EQ(next.at(0), 1.5);
    EXPECT_EQ(next.at(1), -2.0);
    rk.evolve_fixed(y, 0.0, 1.0, 0.1, {});
    EXPECT_EQ(y.at(0), 1.5);
    EXPECT_EQ(rk.stats().steps, 10);
  }
}

TEST(Steps, AdaptiveZeroRhsTakesOneStep) {
  SingleTask comm;
  RkIntegrator rk(bogacki_shampine(), [](double, const ManyVector&, ManyVector& f) { fill(0.0, f); });
  auto y = ManyVector::serial(comm, 3);
  fill(1.0, y);
  rk.evolve_adaptive(y, 0.0, 2.0, {}, {});
  EXPECT_EQ(rk.stats().steps, 1);
  EXPECT_EQ(rk.stats().error_failures, 0);
}

TEST(Steps, ShortSpanIsOneTruncatedStep) {
  SingleTask comm;
  auto problem = smooth_problem();
  RkIntegrator rk(ark324_esdirk(), problem);
  rk.set_record_history(true);
  auto y = ManyVector::serial(comm, 1);
  y.at(0) = 1.0;
  rk.evolve_adaptive(y, 0.0, 1e-7, {}, {}, 1e-3);
  ASSERT_EQ(rk.step_history().size(), 1u);
  EXPECT_DOUBLE_EQ(rk.step_history()[0], 1e-7);
}

TEST(Steps, StiffLinearRelaxesWithoutInstability) {
  const std::array<std::array<int, 2>, 1> one{{{0, 0}}};
  FunctionProblem stiff([](double, const ManyVector& y, ManyVector& f) { f.at(0) = -1e6 * (y.at(0) - 1.0); },
                        [](double, const ManyVector&, CsrMatrix& j) { j.values[0] = -1e6; },
                        block_diagonal_pattern(1, 1, one));
  SingleTask comm;
  RkIntegrator rk(ark324_esdirk(), stiff);
  auto y = ManyVector::serial(comm, 1);
  y.at(0) = 0.0;
  rk.evolve_fixed(y, 0.0, 1.0, 0.1, {});
  EXPECT_NEAR(y.at(0), 1.0, 1e-6);
}

// ---------------------------------------------------------------------------
// Single-cell surrogate network starting from (H, H2, e_g) = (1, 0, 1).

constexpr int kH = field::chem + species::H;
constexpr int kH2 = field::chem + species::H2;
constexpr int kEg = field::chem + species::eg;

std::vector<double> surrogate_reference(double tf) {
  const SurrogateNetwork net({1e2, 1e4, 1e-2, 1.0});
  oracle::Rhs f = [&](double, const oracle::State& y, oracle::State& dy) {
    std::array<double, kFieldsPerCell> cell{}, d{};
    cell[field::et] = y[0];
    cell[kH] = y[1];
    cell[kH2] = y[2];
    cell[kEg] = y[3];
    net.rhs(cell.data(), d.data());
    dy = {d[field::et], d[kH], d[kH2], d[kEg]};
  };
  return oracle::reference_solve(f, {1.0, 1.0, 0.0, 1.0}, 0.0, tf);
}

ManyVector surrogate_cell(Collective& comm) {
  auto y = make_state(comm, 1);
  const auto f = state_fields(y);
  f(field::rho, 0) = 1.0;
  f(field::et, 0) = 1.0;
  f(kH, 0) = 1.0;
  f(kH2, 0) = 0.0;
  f(kEg, 0) = 1.0;
  return y;
}

TEST(Surrogate, AdaptiveSolveMeetsTolerance) {
  const double tf = 0.1;
  const auto ref = surrogate_reference(tf);
  SingleTask comm;
  ChemistryProblem problem(1, SurrogateNetwork({1e2, 1e4, 1e-2, 1.0}), true);
  RkIntegrator rk(ark324_esdirk(), problem);
  auto y = surrogate_cell(comm);
  const Tolerances tol;  // 1e-5 / 1e-9
  ControllerParams params;
  params.h_max = 1e-3;
  rk.set_record_history(true);
  rk.evolve_adaptive(y, 0.0, tf, tol, params);
  const auto f = state_fields(y);
  const std::array<double, 4> got{f(field::et, 0), f(kH, 0), f(kH2, 0), f(kEg, 0)};
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double w = 1.0 / (tol.rtol * std::fabs(ref[i]) + tol.atol);
    sum += (got[i] - ref[i]) * (got[i] - ref[i]) * w * w;
  }
  EXPECT_LE(std::sqrt(sum / 4.0), 5.0);
  // Mass is conserved to rounding.
  EXPECT_NEAR(f(kH, 0) + f(kH2, 0), 1.0, 1e-13);
  // Controller limits: growth and the step cap.
  const auto& hist = rk.step_history();
  ASSERT_GT(hist.size(), 3u);
  for (std::size_t i = 0; i + 1 < hist.size(); ++i) {
    EXPECT_LE(hist[i], params.h_max * (1 + 1e-15));
    EXPECT_LE(hist[i + 1], 2.0 * hist[i] * (1 + 1e-15));
  }
  // After the transient the step saturates at the cap.
  EXPECT_DOUBLE_EQ(hist[hist.size() - 2], params.h_max);
  EXPECT_LT(hist.front(), params.h_max);
}

TEST(Surrogate, StepSequenceIsDeterministic) {
  std::vector<double> first, second;
  for (auto* out : {&first, &second}) {
    SingleTask comm;
    ChemistryProblem problem(1, SurrogateNetwork({1e2, 1e4, 1e-2, 1.0}), true);
    RkIntegrator rk(ark324_esdirk(), problem);
    rk.set_record_history(true);
    auto y = surrogate_cell(comm);
    rk.evolve_adaptive(y, 0.0, 0.05, {}, {});
    *out = rk.step_history();
    out->push_back(state_fields(y)(kH, 0));
  }
  EXPECT_EQ(first, second);
}

TEST(Surrogate, FixedModeSingularBlockIsFatalWithStepIndex) {
  SingleTask comm;
  ChemistryProblem problem(3, SurrogateNetwork({1e2, 1e4, 1e-2, 1.0}), true);
  problem.inject_singular_block(2);
  RkIntegrator rk(ark324_esdirk(), problem);
  auto y = make_state(comm, 3);
  fill(1.0, y);
  try {
    rk.evolve_fixed(y, 0.0, 1e-3, 1e-4, {});
    FAIL() << "expected a solver error";
  } catch (const SolverError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("fixed step 0"), std::string::npos) << what;
    EXPECT_NE(what.find("singular"), std::string::npos) << what;
  }
}

TEST(Surrogate, MaxStepsExceededIsAnError) {
  SingleTask comm;
  ChemistryProblem problem(1, SurrogateNetwork({1e2, 1e4, 1e-2, 1.0}), true);
  RkIntegrator rk(ark324_esdirk(), problem);
  auto y = surrogate_cell(comm);
  ControllerParams params;
  params.h_max = 1e-4;
  params.max_steps = 50;
  EXPECT_THROW(rk.evolve_adaptive(y, 0.0, 1.0, {}, params), SolverError);
}

// ---------------------------------------------------------------------------

TEST(Controller, FormulaPlumbing) {
  ControllerParams p;
  const int pe = 2;
  // err such that safety (1/(bias err))^{1/3} = 1.
  const double err = std::pow(p.safety, pe + 1) / p.bias;
  EXPECT_NEAR(controller_next_h(p, 1.0, err, pe), 1.0, 1e-15);
  EXPECT_EQ(controller_next_h(p, 1.0, 0.0, pe), 2.0);
  EXPECT_NEAR(controller_next_h(p, 1.0, 1.0, pe), 0.99 * std::pow(2.0, -1.0 / 3.0), 1e-15);
  p.h_max = 1.5;
  EXPECT_EQ(controller_next_h(p, 1.0, 0.0, pe), 1.5);
  // Huge errors are floored at the minimum reduction.
  EXPECT_EQ(controller_next_h(ControllerParams{}, 1.0, 1e30, pe), 0.1);
}

TEST(Controller, ValidateRejectsBadValues) {
  ControllerParams p;
  EXPECT_NO_THROW(p.validate());
  p.safety = 1.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.max_growth = 1.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.max_steps = 0;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Integrator, ExplicitConstructorRejectsImplicitTable) {
  EXPECT_THROW(RkIntegrator(ark324_esdirk(), [](double, const ManyVector&, ManyVector&) {}), ConfigError);
  SingleTask comm;
  RkIntegrator rk(classical_rk4(), [](double, const ManyVector&, ManyVector& f) { fill(1.0, f); });
  auto y = ManyVector::serial(comm, 1);
  EXPECT_THROW(rk.evolve_adaptive(y, 0.0, 1.0, {}, {}), ConfigError);
}

}  // namespace
}  // namespace mrflow

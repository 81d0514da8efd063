// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "mrflow/error.hpp"
#include "mrflow/simd.hpp"
#include "mrflow/vectors.hpp"

namespace mrflow {
namespace {

ManyVector from_values(Collective& comm, const std::vector<double>& v, VectorOptions opt = {}) {
  auto x = ManyVector::serial(comm, v.size(), opt);
  for (std::size_t i = 0; i < v.size(); ++i) x.at(i) = v[i];
  return x;
}

ManyVector six_part(Collective& comm, VectorOptions opt) {
  std::vector<SubvectorRequest> parts;
  for (int i = 0; i < 5; ++i) parts.push_back({VectorKind::distributed_field, 7});
  parts.push_back({VectorKind::task_local_block, 11});
  return ManyVector::create(comm, parts, opt);
}

void randomize(ManyVector& x, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t i = 0; i < x.local_length(); ++i) x.at(i) = u(rng);
}

TEST(LinearSum, HandEvaluated) {
  SingleTask comm;
  auto x = from_values(comm, {1, 2});
  auto y = from_values(comm, {4, 5});
  auto z = x.clone_empty();
  linear_sum(2.0, x, 3.0, y, z);
  EXPECT_EQ(z.at(0), 14.0);
  EXPECT_EQ(z.at(1), 19.0);
}

TEST(LinearSum, CancellationAndIdentity) {
  SingleTask comm;
  auto x = from_values(comm, {0.1, -7.5, 3e200});
  auto z = x.clone_empty();
  linear_sum(1.0, x, -1.0, x, z);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(z.at(i), 0.0);
  linear_sum(1.0, x, 0.0, x, z);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(z.at(i), x.at(i));
}

TEST(LinearSum, MismatchedLayoutsThrow) {
  SingleTask comm;
  auto x = ManyVector::serial(comm, 3);
  auto y = ManyVector::serial(comm, 4);
  auto z = x.clone_empty();
  EXPECT_THROW(linear_sum(1.0, x, 1.0, y, z), ConformanceError);
}

TEST(LinearCombination, HandEvaluated) {
  SingleTask comm;
  auto v = from_values(comm, {1, 1});
  auto z = v.clone_empty();
  linear_combination({1.0, 2.0, 3.0}, {&v, &v, &v}, z);
  EXPECT_EQ(z.at(0), 6.0);
  EXPECT_EQ(z.at(1), 6.0);
  linear_combination({1.0, -1.0}, {&v, &v}, z);
  EXPECT_EQ(z.at(0), 0.0);
  linear_combination({1.0}, {&v}, z);
  EXPECT_EQ(z.at(1), 1.0);
}

TEST(LinearCombination, EmptyThrows) {
  SingleTask comm;
  auto z = ManyVector::serial(comm, 2);
  EXPECT_THROW(linear_combination(std::span<const double>{}, std::span<const ManyVector* const>{}, z),
               ConformanceError);
}

TEST(LinearCombination, FusedMatchesSequentialLoopBitwise) {
  SingleTask comm;
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 1 + trial % 8;
    std::vector<ManyVector> vs;
    std::vector<double> coeffs;
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int j = 0; j < k; ++j) {
      vs.push_back(six_part(comm, {}));
      randomize(vs.back(), rng);
      coeffs.push_back(u(rng));
    }
    std::vector<const ManyVector*> ptrs;
    for (auto& v : vs) ptrs.push_back(&v);
    auto fused = vs[0].clone_empty();
    linear_combination(coeffs, ptrs, fused);
    for (std::size_t i = 0; i < fused.local_length(); ++i) {
      double acc = coeffs[0] * vs[0].at(i);
      for (int j = 1; j < k; ++j) acc = acc + coeffs[j] * vs[j].at(i);
      ASSERT_EQ(fused.at(i), acc) << "trial " << trial << " entry " << i;
    }
    auto unfused_v = six_part(comm, {false, false});
    std::vector<ManyVector> us;
    for (auto& v : vs) {
      us.push_back(unfused_v.clone_empty());
      for (std::size_t i = 0; i < v.local_length(); ++i) us.back().at(i) = v.at(i);
    }
    std::vector<const ManyVector*> uptrs;
    for (auto& u2 : us) uptrs.push_back(&u2);
    auto unfused = unfused_v.clone_empty();
    linear_combination(coeffs, uptrs, unfused);
    for (std::size_t i = 0; i < fused.local_length(); ++i) ASSERT_EQ(fused.at(i), unfused.at(i));
  }
}

TEST(MultiDot, UnitVectorsAndOneRound) {
  SingleTask comm;
  auto e1 = from_values(comm, {1, 0});
  auto e2 = from_values(comm, {0, 1});
  std::array<const ManyVector*, 2> ys{&e1, &e2};
  std::array<double, 2> out{};
  multi_dot(e1, ys, out);
  EXPECT_EQ(out[0], 1.0);
  EXPECT_EQ(out[1], 0.0);

  std::mt19937_64 rng(3);
  auto x = six_part(comm, {});
  randomize(x, rng);
  std::vector<ManyVector> vs(4, x.clone_empty());
  for (auto& v : vs) randomize(v, rng);
  std::array<const ManyVector*, 4> ptrs{&vs[0], &vs[1], &vs[2], &vs[3]};
  std::array<double, 4> dots{};
  const auto before = comm.ledger().global_rounds;
  multi_dot(x, ptrs, dots);
  EXPECT_EQ(comm.ledger().global_rounds - before, 1u);
  EXPECT_EQ(dots[2], dot(x, vs[2]));
}

TEST(WrmsNorm, HandEvaluated) {
  SingleTask comm;
  auto x = from_values(comm, {3, 4});
  auto w = from_values(comm, {1, 1});
  EXPECT_DOUBLE_EQ(wrms_norm(x, w), std::sqrt(12.5));
  fill(0.0, x);
  EXPECT_EQ(wrms_norm(x, w), 0.0);
  auto ones = ManyVector::serial(comm, 1001);
  fill(1.0, ones);
  EXPECT_EQ(wrms_norm(ones, ones), 1.0);
}

TEST(WrmsNorm, BatchedIsOneRoundUnbatchedIsSix) {
  SingleTask comm;
  std::mt19937_64 rng(11);
  for (bool batched : {true, false}) {
    auto x = six_part(comm, {batched, batched});
    randomize(x, rng);
    auto w = x.clone_empty();
    fill(2.0, w);
    const auto before = comm.ledger().global_rounds;
    (void)wrms_norm(x, w);
    EXPECT_EQ(comm.ledger().global_rounds - before, batched ? 1u : 6u);
  }
}

TEST(WrmsNorm, BatchedAndUnbatchedAgreeBitwise) {
  SingleTask comm;
  std::mt19937_64 rng(12);
  auto a = six_part(comm, {});
  auto b = six_part(comm, {false, false});
  randomize(a, rng);
  for (std::size_t i = 0; i < a.local_length(); ++i) b.at(i) = a.at(i);
  auto wa = a.clone_empty(), wb = b.clone_empty();
  error_weights(a, 1e-5, 1e-9, wa);
  error_weights(b, 1e-5, 1e-9, wb);
  EXPECT_EQ(wrms_norm(a, wa), wrms_norm(b, wb));
}

TEST(WrmsNorm, Homogeneity) {
  SingleTask comm;
  std::mt19937_64 rng(5);
  auto x = six_part(comm, {});
  auto w = x.clone_empty();
  auto ax = x.clone_empty();
  for (int trial = 0; trial < 30; ++trial) {
    randomize(x, rng);
    randomize(w, rng);
    for (std::size_t i = 0; i < w.local_length(); ++i) w.at(i) = std::fabs(w.at(i)) + 0.1;
    const double alpha = std::ldexp(1.0 + trial * 0.37, trial % 5 - 2) * (trial % 2 ? -1 : 1);
    scale(alpha, x, ax);
    const double lhs = wrms_norm(ax, w);
    const double rhs = std::fabs(alpha) * wrms_norm(x, w);
    EXPECT_LE(std::fabs(lhs - rhs), 2.0 * std::nextafter(rhs, INFINITY) - 2.0 * rhs);
  }
}

TEST(ErrorWeights, PositiveWithPositiveAtol) {
  SingleTask comm;
  auto y = from_values(comm, {0.0, -2.0, 1e300});
  auto w = y.clone_empty();
  error_weights(y, 1e-5, 1e-9, w);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_GT(w.at(i), 0.0);
  EXPECT_DOUBLE_EQ(w.at(1), 1.0 / (2e-5 + 1e-9));
}

TEST(Layout, OutputsKeepTheInputLayout) {
  SingleTask comm;
  auto x = six_part(comm, {});
  auto z = x.clone_empty();
  linear_sum(1.0, x, 2.0, x, z);
  EXPECT_TRUE(z.layout().conforms(x.layout()));
  EXPECT_EQ(z.subvector_count(), 6u);
  EXPECT_EQ(z.layout().global_length(), 46u);
}

TEST(Layout, GlobalLengthsSumOverTasks) {
  run_tasks(3, [](Collective& comm) {
    std::array<SubvectorRequest, 2> parts{
        SubvectorRequest{VectorKind::distributed_field, static_cast<std::size_t>(comm.rank() + 1)},
        SubvectorRequest{VectorKind::task_local_block, 4}};
    auto x = ManyVector::create(comm, parts);
    EXPECT_EQ(x.layout().specs()[0].global_length, 6u);
    EXPECT_EQ(x.layout().specs()[1].global_length, 12u);
    EXPECT_EQ(x.layout().global_length(), 18u);
  });
}

TEST(LocalReduction, FinalizeCombinesPartials) {
  run_tasks(3, [](Collective& comm) {
    comm.begin_local_phase();
    EXPECT_EQ(comm.finalize_local(ReduceOp::sum, comm.rank() + 1.0), 6.0);
    EXPECT_EQ(comm.finalize_local(ReduceOp::min, 0.25), 0.25);
    const double partials[] = {0.1, 0.9, 0.5};
    EXPECT_EQ(comm.finalize_local(ReduceOp::max, partials[comm.rank()]), 0.9);
    comm.end_local_phase();
  });
}

TEST(LocalReduction, OutsidePhaseIsProtocolError) {
  SingleTask comm;
  EXPECT_THROW(comm.finalize_local(ReduceOp::sum, 1.0), ProtocolError);
  EXPECT_THROW(comm.end_local_phase(), ProtocolError);
}

TEST(LocalReduction, MatchesSingleShotAcrossTaskCounts) {
  // The same global vector split over 1 and 4 tasks reduces to the same bits.
  std::mt19937_64 rng(99);
  std::vector<double> global(400);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (auto& g : global) g = u(rng) * std::pow(10.0, static_cast<int>(u(rng)) % 12);
  double serial_norm = 0.0, serial_dot = 0.0;
  run_tasks(1, [&](Collective& comm) {
    auto x = from_values(comm, global);
    auto w = x.clone_empty();
    error_weights(x, 1e-6, 1e-3, w);
    serial_norm = wrms_norm(x, w);
    serial_dot = dot(x, x);
  });
  run_tasks(4, [&](Collective& comm) {
    std::array<SubvectorRequest, 1> part{SubvectorRequest{VectorKind::distributed_field, 100}};
    auto x = ManyVector::create(comm, part);
    for (std::size_t i = 0; i < 100; ++i) x.at(i) = global[comm.rank() * 100 + i];
    auto w = x.clone_empty();
    error_weights(x, 1e-6, 1e-3, w);
    EXPECT_EQ(wrms_norm(x, w), serial_norm);
    EXPECT_EQ(dot(x, x), serial_dot);
  });
}

TEST(Kernels, Avx2MatchesScalarBitwise) {
  if (!simd::avx2_available()) GTEST_SKIP() << "no AVX2 on this machine";
  const auto& s = simd::vector_kernels(simd::Level::scalar);
  const auto& v = simd::vector_kernels(simd::Level::avx2);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 64u, 1001u}) {
    std::vector<double> x(n), y(n), zs(n), zv(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = u(rng);
      y[i] = u(rng);
    }
    s.linear_sum(1.3, x.data(), -0.7, y.data(), zs.data(), n);
    v.linear_sum(1.3, x.data(), -0.7, y.data(), zv.data(), n);
    EXPECT_EQ(zs, zv);
    s.scale(3.1, x.data(), zs.data(), n);
    v.scale(3.1, x.data(), zv.data(), n);
    EXPECT_EQ(zs, zv);
    zs = y;
    zv = y;
    s.accumulate(0.3, x.data(), zs.data(), n);
    v.accumulate(0.3, x.data(), zv.data(), n);
    EXPECT_EQ(zs, zv);
    s.error_weights(x.data(), 1e-4, 1e-8, zs.data(), n);
    v.error_weights(x.data(), 1e-4, 1e-8, zv.data(), n);
    EXPECT_EQ(zs, zv);
    ExactSum as, av, ds, dv;
    s.weighted_squares(x.data(), y.data(), n, as);
    v.weighted_squares(x.data(), y.data(), n, av);
    EXPECT_EQ(as.value(), av.value());
    s.dot(x.data(), y.data(), n, ds);
    v.dot(x.data(), y.data(), n, dv);
    EXPECT_EQ(ds.value(), dv.value());
    EXPECT_EQ(s.max_abs(x.data(), n, 0.0), v.max_abs(x.data(), n, 0.0));
  }
}

TEST(ExactSumTest, OrderIndependent) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> xs(2000);
  for (auto& x : xs) x = std::ldexp(u(rng), static_cast<int>(rng() % 200) - 100);
  ExactSum a;
  for (double x : xs) a.add(x);
  std::shuffle(xs.begin(), xs.end(), rng);
  ExactSum b, c;
  for (std::size_t i = 0; i < xs.size(); ++i) (i % 3 ? b : c).add(xs[i]);
  b.merge(c);
  EXPECT_EQ(a.value(), b.value());
  ExactSum t;
  t.add(1e16);
  t.add(1.0);
  t.add(-1e16);
  EXPECT_EQ(t.value(), 1.0);
}

TEST(Snapshot, RoundTripAndRejectsGarbage) {
  std::vector<double> a{1.0, -2.5, 1e-300}, b{4.0};
  std::array<std::span<const double>, 2> parts{a, b};
  std::stringstream ss;
  write_snapshot(ss, parts);
  const auto back = read_snapshot(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0], a);
  EXPECT_EQ(back[1], b);
  std::stringstream bad("not a snapshot at all");
  EXPECT_THROW(read_snapshot(bad), IoError);
  std::string truncated = [&] {
    std::stringstream s2;
    write_snapshot(s2, parts);
    auto str = s2.str();
    return str.substr(0, str.size() - 4);
  }();
  std::stringstream tr(truncated);
  EXPECT_THROW(read_snapshot(tr), IoError);
}

}  // namespace
}  // namespace mrflow

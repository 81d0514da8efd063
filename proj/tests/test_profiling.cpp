// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <chrono>
#include <set>
#include <string>
#include <thread>

#include "mrflow/error.hpp"
#include "mrflow/profiling.hpp"

namespace mrflow {
namespace {

using namespace std::chrono_literals;

void busy_wait(std::chrono::duration<double> d) {
  const auto end = std::chrono::steady_clock::now() + d;
  while (std::chrono::steady_clock::now() < end) {
  }
}

TEST(Regions, NamesAndLetters) {
  EXPECT_EQ(region_letter(Region::setup), 'a');
  EXPECT_EQ(region_letter(Region::total), 'n');
  std::set<std::string> names;
  for (std::size_t i = 0; i < kRegionCount; ++i) names.insert(std::string(region_name(static_cast<Region>(i))));
  EXPECT_EQ(names.size(), kRegionCount);
  EXPECT_EQ(region_name(Region::weno), "FD-WENO");
}

TEST(Scope, EmptyScopeAddsAlmostNothing) {
  Profiler p;
  { ScopedRegion s(&p, Region::io); }
  EXPECT_GE(p.seconds(Region::io), 0.0);
  EXPECT_LT(p.seconds(Region::io), 1e-3);
  EXPECT_GT(timer_resolution(), 0.0);
  EXPECT_LT(timer_resolution(), 1e-3);
}

TEST(Scope, SequentialScopesAdd) {
  Profiler p;
  { ScopedRegion s(&p, Region::mpi); busy_wait(2ms); }
  const double first = p.seconds(Region::mpi);
  { ScopedRegion s(&p, Region::mpi); busy_wait(2ms); }
  EXPECT_GE(first, 2e-3);
  EXPECT_GE(p.seconds(Region::mpi), first + 2e-3);
}

TEST(Scope, NestedRegionsBothAccumulate) {
  Profiler p;
  {
    ScopedRegion outer(&p, Region::euler);
    busy_wait(1ms);
    {
      ScopedRegion inner(&p, Region::weno);
      busy_wait(3ms);
    }
  }
  EXPECT_GE(p.seconds(Region::weno), 3e-3);
  EXPECT_GE(p.seconds(Region::euler), p.seconds(Region::weno) + 1e-3);
}

TEST(Scope, ReentrantSameRegionCountsOuterOnly) {
  Profiler p;
  {
    ScopedRegion a(&p, Region::fslow);
    busy_wait(1ms);
    {
      ScopedRegion b(&p, Region::fslow);
      busy_wait(1ms);
    }
  }
  EXPECT_GE(p.seconds(Region::fslow), 2e-3);
  EXPECT_LT(p.seconds(Region::fslow), 3.5e-3);
}

TEST(Scope, NullProfilerIsHarmless) {
  ScopedRegion s(nullptr, Region::total);
  SUCCEED();
}

TEST(Sundials, Formula) {
  RegionTimes t{};
  EXPECT_EQ(sundials_time(t), 0.0);
  t[index(Region::transient)] = 6.0;
  t[index(Region::fixed_step)] = 4.0;
  t[index(Region::fslow)] = 2.0;
  t[index(Region::ffast)] = 1.0;
  t[index(Region::jfast)] = 1.0;
  t[index(Region::lsetup)] = 2.0;
  t[index(Region::lsolve)] = 1.0;
  EXPECT_DOUBLE_EQ(sundials_time(t), 3.0);
}

TEST(Sundials, InjectedDelayRecovered) {
  Profiler p;
  {
    ScopedRegion l(&p, Region::transient);
    { ScopedRegion g(&p, Region::fslow); std::this_thread::sleep_for(20ms); }
    { ScopedRegion h(&p, Region::ffast); std::this_thread::sleep_for(10ms); }
    std::this_thread::sleep_for(30ms);  // integrator infrastructure
  }
  {
    ScopedRegion m(&p, Region::fixed_step);
    { ScopedRegion k(&p, Region::lsolve); std::this_thread::sleep_for(10ms); }
    std::this_thread::sleep_for(30ms);
  }
  EXPECT_NEAR(sundials_time(p.totals()), 0.060, 0.05 * 0.060);
}

TEST(Aggregate, MinMeanMaxAcrossTasks) {
  run_tasks(4, [](Collective& comm) {
    Profiler p;
    p.add(Region::setup, 1.0 + comm.rank());
    p.add(Region::transient, 2.0);
    p.count_slow_step();
    p.count_slow_step();
    const auto rounds = comm.ledger().global_rounds;
    const auto s = aggregate(p, comm);
    EXPECT_EQ(comm.ledger().global_rounds - rounds, 1u);
    EXPECT_EQ(s.tasks, 4);
    EXPECT_EQ(s[Region::setup].min, 1.0);
    EXPECT_EQ(s[Region::setup].max, 4.0);
    EXPECT_DOUBLE_EQ(s[Region::setup].mean, 2.5);
    EXPECT_DOUBLE_EQ(s.per_slow_step.mean, 1.0);
    EXPECT_EQ(s.slow_steps, 2u);
    for (const auto& r : s.regions) {
      EXPECT_LE(r.min, r.mean);
      EXPECT_LE(r.mean, r.max);
    }
  });
}

TEST(Efficiency, ReferenceAndDoubling) {
  Profiler a, b, none;
  a.add(Region::fixed_step, 4.0);
  a.count_slow_step();
  b.add(Region::fixed_step, 8.0);
  b.count_slow_step();
  const auto sa = summarize_local(a), sb = summarize_local(b);
  EXPECT_EQ(parallel_efficiency(sa, sa), 1.0);
  EXPECT_EQ(parallel_efficiency(sb, sa), 0.5);
  EXPECT_THROW(parallel_efficiency(summarize_local(none), sa), DomainError);
}

}  // namespace
}  // namespace mrflow

// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrflow/profiling.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "mrflow/error.hpp"

namespace mrflow {

char region_letter(Region r) noexcept { return static_cast<char>('a' + index(r)); }

std::string_view region_name(Region r) noexcept {
  static constexpr std::array<std::string_view, kRegionCount> kNames{
      "Setup", "IO",     "MPI",    "Packing", "FD-WENO",   "Euler",     "fslow",
      "ffast", "Jfast", "LSetup", "LSolve",  "Transient", "FixedStep", "Total"};
  return kNames[index(r)];
}

void Profiler::open(Region region) noexcept {
  const auto i = index(region);
  if (depth_[i]++ == 0) started_[i] = Clock::now();
}

void Profiler::close(Region region) noexcept {
  const auto i = index(region);
  if (--depth_[i] == 0) {
    totals_[i] += std::chrono::duration<double>(Clock::now() - started_[i]).count();
  }
}

void Profiler::reset() noexcept {
  totals_.fill(0.0);
  depth_.fill(0);
  slow_steps_ = 0;
}

double sundials_time(const RegionTimes& t) noexcept {
  return (t[index(Region::transient)] + t[index(Region::fixed_step)]) -
         (t[index(Region::fslow)] + t[index(Region::ffast)] + t[index(Region::jfast)] +
          t[index(Region::lsetup)] + t[index(Region::lsolve)]);
}

namespace {

double per_step(const Profiler& p) {
  if (p.slow_steps() == 0) return 0.0;
  return (p.seconds(Region::transient) + p.seconds(Region::fixed_step)) /
         static_cast<double>(p.slow_steps());
}

}  // namespace

ProfileSummary summarize_local(const Profiler& profiler) {
  ProfileSummary s;
  s.tasks = 1;
  for (std::size_t i = 0; i < kRegionCount; ++i) {
    const double v = profiler.totals()[i];
    s.regions[i] = {v, v, v};
  }
  const double sd = sundials_time(profiler.totals());
  s.sundials = {sd, sd, sd};
  const double ps = per_step(profiler);
  s.per_slow_step = {ps, ps, ps};
  s.slow_steps = profiler.slow_steps();
  return s;
}

ProfileSummary aggregate(const Profiler& profiler, Collective& comm) {
  constexpr std::size_t n = kRegionCount + 3;  // regions, sundials, per-step, step count
  std::vector<double> local(profiler.totals().begin(), profiler.totals().end());
  local.push_back(sundials_time(profiler.totals()));
  local.push_back(per_step(profiler));
  local.push_back(static_cast<double>(profiler.slow_steps()));

  std::vector<ExactSum> sums(n);
  std::vector<double> mins(local);
  std::vector<double> maxs(local);
  for (std::size_t i = 0; i < n; ++i) sums[i].add(local[i]);
  comm.allreduce(sums, mins, maxs);

  const double tasks = static_cast<double>(comm.size());
  auto stats = [&](std::size_t i) { return RegionStats{mins[i], sums[i].value() / tasks, maxs[i]}; };
  ProfileSummary s;
  s.tasks = comm.size();
  for (std::size_t i = 0; i < kRegionCount; ++i) s.regions[i] = stats(i);
  s.sundials = stats(kRegionCount);
  s.per_slow_step = stats(kRegionCount + 1);
  s.slow_steps = static_cast<std::uint64_t>(maxs[kRegionCount + 2]);
  return s;
}

double parallel_efficiency(const ProfileSummary& run, const ProfileSummary& reference) {
  if (run.slow_steps == 0 || reference.slow_steps == 0) {
    throw DomainError("parallel efficiency needs at least one slow step in both runs");
  }
  if (!(run.per_slow_step.mean > 0.0)) throw DomainError("nonpositive time per slow step");
  return reference.per_slow_step.mean / run.per_slow_step.mean;
}

double timer_resolution() {
  using Clock = Profiler::Clock;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 16; ++i) {
    const auto t0 = Clock::now();
    auto t1 = Clock::now();
    while (t1 == t0) t1 = Clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

}  // namespace mrflow

// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <string_view>

#include "mrflow/collective.hpp"

namespace mrflow {

/// Timed regions, labelled (a) through (n).
enum class Region : std::uint8_t {
  setup,       // (a)
  io,          // (b)
  mpi,         // (c) application communication, excluding vector reductions
  packing,     // (d)
  weno,        // (e)
  euler,       // (f) contains (c), (d), (e) and the flux divergence
  fslow,       // (g) contains (f) and unit conversions
  ffast,       // (h)
  jfast,       // (i) Jacobian evaluation and CSR assembly
  lsetup,      // (j)
  lsolve,      // (k)
  transient,   // (l)
  fixed_step,  // (m)
  total,       // (n) = (a) + (l) + (m)
};

inline constexpr std::size_t kRegionCount = 14;

using RegionTimes = std::array<double, kRegionCount>;

constexpr std::size_t index(Region r) noexcept { return static_cast<std::size_t>(r); }
char region_letter(Region r) noexcept;
std::string_view region_name(Region r) noexcept;

/// Per-task accumulated wall time per region. Nested scopes of the same
/// region only count the outermost interval.
class Profiler {
 public:
  using Clock = std::chrono::steady_clock;

  class Scope {
   public:
    Scope(Profiler* profiler, Region region) : profiler_(profiler), region_(region) {
      if (profiler_) profiler_->open(region_);
    }
    ~Scope() {
      if (profiler_) profiler_->close(region_);
    }
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    Profiler* profiler_;
    Region region_;
  };

  Scope scope(Region region) { return Scope(this, region); }

  /// Adds a measured duration directly (used by synthetic runs and tests).
  void add(Region region, double seconds) noexcept { totals_[index(region)] += seconds; }

  double seconds(Region region) const noexcept { return totals_[index(region)]; }
  const RegionTimes& totals() const noexcept { return totals_; }

  void count_slow_step() noexcept { ++slow_steps_; }
  std::uint64_t slow_steps() const noexcept { return slow_steps_; }

  void reset() noexcept;

 private:
  void open(Region region) noexcept;
  void close(Region region) noexcept;

  RegionTimes totals_{};
  std::array<int, kRegionCount> depth_{};
  std::array<Clock::time_point, kRegionCount> started_{};
  std::uint64_t slow_steps_ = 0;
};

/// RAII timer that tolerates a null profiler.
using ScopedRegion = Profiler::Scope;

/// (l + m) - (g + h + i + j + k)
double sundials_time(const RegionTimes& t) noexcept;

struct RegionStats {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

/// Cross-task aggregate of a run's profiles.
struct ProfileSummary {
  int tasks = 1;
  std::array<RegionStats, kRegionCount> regions{};
  RegionStats sundials;
  RegionStats per_slow_step;  // ((l) + (m)) / slow steps
  std::uint64_t slow_steps = 0;

  const RegionStats& operator[](Region r) const noexcept { return regions[index(r)]; }
};

/// Collective: aggregates every region in a single reduction round.
ProfileSummary aggregate(const Profiler& profiler, Collective& comm);

/// Summary of a single task's profile (no communication).
ProfileSummary summarize_local(const Profiler& profiler);

/// Reference mean time per slow step divided by this run's. Throws
/// DomainError if either run has no slow steps.
double parallel_efficiency(const ProfileSummary& run, const ProfileSummary& reference);

/// Smallest observable increment of the profiler clock, in seconds.
double timer_resolution();

}  // namespace mrflow

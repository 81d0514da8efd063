// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mrflow/profiling.hpp"

namespace mrflow {

/// One CSV row: a region of one run. Besides the fourteen regions the
/// pseudo-regions "sundials" and "per_step" are emitted.
struct ProfileRecord {
  int tasks = 1;
  std::string region;
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
  double efficiency = 1.0;
  std::string mode = "fused";

  friend bool operator==(const ProfileRecord&, const ProfileRecord&) = default;
};

inline constexpr const char* kPerStepRegion = "per_step";
inline constexpr const char* kSundialsRegion = "sundials";

std::vector<ProfileRecord> profile_records(const ProfileSummary& summary, const std::string& mode,
                                           double efficiency = 1.0);

/// Header "tasks,region,min,mean,max,efficiency,mode"; floats with 17
/// significant digits.
void write_profile_csv(std::ostream& out, const std::vector<ProfileRecord>& records);
/// Throws IoError on malformed input.
std::vector<ProfileRecord> read_profile_csv(std::istream& in);

struct Report {
  std::vector<ProfileRecord> rows;  // efficiency recomputed per mode
  /// Per mode, the regions kept for plotting (mean above 0.5% of the
  /// total region in at least one run).
  std::vector<std::pair<std::string, std::vector<std::string>>> plotted;
  std::string plot_script;  // matplotlib, reads nothing, data inlined
};

/// Groups records by (mode, tasks). The smallest task count of each mode is
/// the efficiency reference.
Report build_report(const std::vector<ProfileRecord>& records, double plot_threshold = 0.005);

}  // namespace mrflow

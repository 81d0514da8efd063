// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrflow/report.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "mrflow/error.hpp"

namespace mrflow {

std::vector<ProfileRecord> profile_records(const ProfileSummary& summary, const std::string& mode,
                                           double efficiency) {
  std::vector<ProfileRecord> out;
  for (std::size_t i = 0; i < kRegionCount; ++i) {
    const auto r = static_cast<Region>(i);
    const auto& s = summary[r];
    out.push_back({summary.tasks, std::string(region_name(r)), s.min, s.mean, s.max, efficiency, mode});
  }
  out.push_back({summary.tasks, kSundialsRegion, summary.sundials.min, summary.sundials.mean,
                 summary.sundials.max, efficiency, mode});
  out.push_back({summary.tasks, kPerStepRegion, summary.per_slow_step.min,
                 summary.per_slow_step.mean, summary.per_slow_step.max, efficiency, mode});
  return out;
}

void write_profile_csv(std::ostream& out, const std::vector<ProfileRecord>& records) {
  out << "tasks,region,min,mean,max,efficiency,mode\n";
  out << std::setprecision(17);
  for (const auto& r : records) {
    out << r.tasks << ',' << r.region << ',' << r.min << ',' << r.mean << ',' << r.max << ','
        << r.efficiency << ',' << r.mode << '\n';
  }
}

std::vector<ProfileRecord> read_profile_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "tasks,region,min,mean,max,efficiency,mode") {
    throw IoError("profile CSV: missing header");
  }
  std::vector<ProfileRecord> out;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 7) throw IoError("profile CSV line " + std::to_string(lineno) + ": expected 7 columns");
    try {
      ProfileRecord r;
      r.tasks = std::stoi(cells[0]);
      r.region = cells[1];
      r.min = std::stod(cells[2]);
      r.mean = std::stod(cells[3]);
      r.max = std::stod(cells[4]);
      r.efficiency = std::stod(cells[5]);
      r.mode = cells[6];
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw IoError("profile CSV line " + std::to_string(lineno) + ": bad number");
    }
  }
  return out;
}

namespace {

bool pseudo_region(const std::string& name) {
  return name == kPerStepRegion || name == kSundialsRegion;
}

std::string python_string(const std::string& s) { return "'" + s + "'"; }

}  // namespace

Report build_report(const std::vector<ProfileRecord>& records, double plot_threshold) {
  if (records.empty()) throw ConfigError("report needs at least one profile");
  // mode -> tasks -> rows, modes in order of first appearance
  std::vector<std::string> modes;
  std::map<std::string, std::map<int, std::vector<ProfileRecord>>> runs;
  for (const auto& r : records) {
    if (std::find(modes.begin(), modes.end(), r.mode) == modes.end()) modes.push_back(r.mode);
    runs[r.mode][r.tasks].push_back(r);
  }
  auto lookup = [](const std::vector<ProfileRecord>& rows, const std::string& region) -> const ProfileRecord* {
    for (const auto& r : rows) {
      if (r.region == region) return &r;
    }
    return nullptr;
  };

  Report report;
  std::ostringstream data;
  data << std::setprecision(17);
  for (const auto& mode : modes) {
    auto& by_tasks = runs[mode];
    const auto& reference = by_tasks.begin()->second;
    const ProfileRecord* ref_step = lookup(reference, kPerStepRegion);
    std::vector<std::string> regions;
    for (auto& [tasks, rows] : by_tasks) {
      const ProfileRecord* step = lookup(rows, kPerStepRegion);
      double eff = 1.0;
      if (ref_step != nullptr && step != nullptr && step->mean > 0.0) eff = ref_step->mean / step->mean;
      const ProfileRecord* total = lookup(rows, std::string(region_name(Region::total)));
      for (auto& r : rows) {
        r.efficiency = eff;
        report.rows.push_back(r);
        if (pseudo_region(r.region) || total == nullptr) continue;
        if (r.mean > plot_threshold * total->mean &&
            std::find(regions.begin(), regions.end(), r.region) == regions.end()) {
          regions.push_back(r.region);
        }
      }
    }
    // Keep the region enumeration order for stable plots.
    std::vector<std::string> ordered;
    for (std::size_t i = 0; i < kRegionCount; ++i) {
      const std::string name(region_name(static_cast<Region>(i)));
      if (std::find(regions.begin(), regions.end(), name) != regions.end()) ordered.push_back(name);
    }
    data << "    " << python_string(mode) << ": {\n";
    for (const auto& region : ordered) {
      data << "        " << python_string(region) << ": [";
      for (const auto& [tasks, rows] : by_tasks) {
        const ProfileRecord* r = lookup(rows, region);
        if (r == nullptr) continue;
        data << '(' << tasks << ", " << r->min << ", " << r->mean << ", " << r->max << "), ";
      }
      data << "],\n";
    }
    data << "    },\n";
    report.plotted.emplace_back(mode, std::move(ordered));
  }

  std::ostringstream eff;
  eff << std::setprecision(17);
  for (const auto& mode : modes) {
    eff << "    " << python_string(mode) << ": [";
    for (const auto& r : report.rows) {
      if (r.mode == mode && r.region == kPerStepRegion) eff << '(' << r.tasks << ", " << r.efficiency << "), ";
    }
    eff << "],\n";
  }

  std::ostringstream script;
  script << "# Weak-scaling region times: mean with min/max bars per task count.\n"
         << "import matplotlib\n"
         << "matplotlib.use('Agg')\n"
         << "import matplotlib.pyplot as plt\n\n"
         << "data = {\n"
         << data.str() << "}\n\n"
         << "fig, axes = plt.subplots(1, len(data), figsize=(6 * len(data), 4.5), sharey=True, squeeze=False)\n"
         << "for ax, (mode, series) in zip(axes[0], data.items()):\n"
         << "    for region, pts in series.items():\n"
         << "        tasks = [p[0] for p in pts]\n"
         << "        mean = [p[2] for p in pts]\n"
         << "        lo = [p[2] - p[1] for p in pts]\n"
         << "        hi = [p[3] - p[2] for p in pts]\n"
         << "        ax.errorbar(tasks, mean, yerr=[lo, hi], marker='o', capsize=3, label=region)\n"
         << "    ax.set_xscale('log')\n"
         << "    ax.set_xlabel('tasks')\n"
         << "    ax.set_title(mode)\n"
         << "axes[0][0].set_ylabel('seconds')\n"
         << "axes[0][-1].legend(fontsize='small')\n"
         << "fig.tight_layout()\n"
         << "fig.savefig('weak_scaling.png', dpi=150)\n\n"
         << "efficiency = {\n"
         << eff.str() << "}\n"
         << "for mode, rows in efficiency.items():\n"
         << "    for tasks, e in rows:\n"
         << "        print(f'{mode:8s} {tasks:8d} {e:6.2f}')\n";
  report.plot_script = script.str();
  return report;
}

}  // namespace mrflow

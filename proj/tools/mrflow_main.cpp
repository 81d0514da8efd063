// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

// Batch driver: run a simulation, print a weak-scaling plan row, or turn
// profile CSVs into a report.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "mrflow/config.hpp"
#include "mrflow/error.hpp"
#include "mrflow/plan.hpp"
#include "mrflow/profiling.hpp"
#include "mrflow/report.hpp"
#include "mrflow/simd.hpp"
#include "mrflow/simulation.hpp"

namespace {

enum ExitCode : int { kOk = 0, kOther = 1, kConfig = 2, kSolver = 3, kIo = 4 };

struct RunOptions {
  std::string config;
  int tasks = 0;
  bool unfused = false;
  int plan = 0;
  std::string csv;
  std::string snapshot;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::vector<std::string> overrides;
};

int run_command(const RunOptions& opt) {
  mrflow::RunConfig config;
  if (!opt.config.empty()) config = mrflow::load_config(opt.config);
  if (const char* env = std::getenv("MRFLOW_TASKS")) {
    mrflow::set_config_value(config, "mesh.tasks", env);
  }
  if (opt.plan > 0) {
    const auto row = mrflow::scaling_plan(opt.plan);
    config.cells = row.cells;
    config.h_slow = row.h_slow;
    config.h_fast = row.h_fast;
    config.t0 = 0.0;
    config.tf = row.tf;
  }
  for (const auto& kv : opt.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw mrflow::ConfigError("--set expects key=value, got '" + kv + "'");
    mrflow::set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (opt.tasks > 0) config.tasks = opt.tasks;
  if (opt.unfused) {
    config.vectors.fused_ops = false;
    config.vectors.batched_reductions = false;
  }
  if (!opt.csv.empty()) config.csv_path = opt.csv;
  if (!opt.snapshot.empty()) config.snapshot_path = opt.snapshot;
  if (opt.seed_set) config.seed = opt.seed;

  std::cerr << "timer resolution " << mrflow::timer_resolution() << " s, kernels "
            << (mrflow::simd::active_level() == mrflow::simd::Level::avx2 ? "avx2" : "scalar") << '\n';
  const auto result = mrflow::run_simulation(config);
  std::cout << std::setprecision(6);
  std::cout << "tasks " << result.profile.tasks << ", slow steps " << result.slow_steps
            << ", reduction rounds " << result.reduction_rounds << '\n';
  std::cout << "transient: fast steps " << result.phases.transient.fast_steps << ", Newton iterations "
            << result.phases.transient.newton_iterations << '\n';
  std::cout << "fixed:     fast steps " << result.phases.fixed.fast_steps << ", Newton iterations "
            << result.phases.fixed.newton_iterations << '\n';
  for (std::size_t i = 0; i < mrflow::kRegionCount; ++i) {
    const auto r = static_cast<mrflow::Region>(i);
    const auto& s = result.profile[r];
    std::cout << '(' << mrflow::region_letter(r) << ") " << std::left << std::setw(10)
              << mrflow::region_name(r) << std::right << std::setw(14) << s.min << std::setw(14) << s.mean
              << std::setw(14) << s.max << '\n';
  }
  std::cout << "sundials   " << result.profile.sundials.mean << '\n';
  return kOk;
}

int report_command(const std::vector<std::string>& inputs, const std::string& csv_out,
                   const std::string& script_out) {
  std::vector<mrflow::ProfileRecord> records;
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) throw mrflow::IoError("cannot open '" + path + "'");
    auto rows = mrflow::read_profile_csv(in);
    records.insert(records.end(), rows.begin(), rows.end());
  }
  const auto report = mrflow::build_report(records);
  auto emit = [](const std::string& path, auto&& write) {
    if (path.empty() || path == "-") {
      write(std::cout);
      return;
    }
    std::ofstream out(path);
    if (!out) throw mrflow::IoError("cannot write '" + path + "'");
    write(out);
  };
  emit(csv_out, [&](std::ostream& out) { mrflow::write_profile_csv(out, report.rows); });
  if (!script_out.empty()) emit(script_out, [&](std::ostream& out) { out << report.plot_script; });
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mrflow: multirate reacting-flow solver"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "run a simulation");
  run_cmd->add_option("--config", run.config, "configuration file");
  run_cmd->add_option("--tasks", run.tasks, "worker count (overrides MRFLOW_TASKS and the file)");
  run_cmd->add_flag("--unfused", run.unfused, "disable fused operations and batched reductions");
  run_cmd->add_option("--plan", run.plan, "take mesh and steps from weak-scaling row n");
  run_cmd->add_option("--csv", run.csv, "profile CSV output");
  run_cmd->add_option("--snapshot", run.snapshot, "final state snapshot output");
  auto* seed_opt = run_cmd->add_option("--seed", run.seed, "clump seed");
  run_cmd->add_option("--set", run.overrides, "section.key=value override (repeatable)");

  int plan_n = 1;
  auto* plan_cmd = app.add_subcommand("plan", "print a weak-scaling plan row");
  plan_cmd->add_option("--n", plan_n, "row index")->required();

  std::vector<std::string> inputs;
  std::string report_csv = "-";
  std::string report_script;
  auto* report_cmd = app.add_subcommand("report", "combine profile CSVs");
  report_cmd->add_option("--inputs", inputs, "profile CSV files")->required();
  report_cmd->add_option("--csv", report_csv, "combined CSV output (- for stdout)");
  report_cmd->add_option("--plot-script", report_script, "matplotlib script output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run_cmd) {
      run.seed_set = seed_opt->count() > 0;
      return run_command(run);
    }
    if (*plan_cmd) {
      std::cout << mrflow::format_plan_row(mrflow::scaling_plan(plan_n));
      return kOk;
    }
    return report_command(inputs, report_csv, report_script);
  } catch (const mrflow::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const mrflow::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const mrflow::DomainError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const mrflow::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
}

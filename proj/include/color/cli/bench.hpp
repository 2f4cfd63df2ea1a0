#pragma once

#include <cstdint>
#include <vector>

#include "color/cli/config.hpp"
#include "json.hpp"

namespace color::cli {

struct BenchEntry {
  int n_envs = 0;
  double wall_seconds = 0.0;
  std::uint64_t steps = 0;  // aggregate env steps
  std::vector<std::uint64_t> per_copy_steps;
  double simulated_seconds = 0.0;

  double steps_per_second() const { return wall_seconds > 0.0 ? static_cast<double>(steps) / wall_seconds : 0.0; }
  double per_copy_steps_per_second() const { return n_envs > 0 ? steps_per_second() / n_envs : 0.0; }
  double rtf() const { return wall_seconds > 0.0 ? simulated_seconds / wall_seconds : 0.0; }
};

struct BenchReport {
  std::vector<BenchEntry> entries;
};

/// Steps uniformly random policies through VecEnv(N) for `duration_s` of wall
/// time per N. Uses the configured training maps and ranges, or one generated
/// map when none are configured. Throws ConfigError on a non-positive budget.
BenchReport run_bench(const RunConfig& cfg, double duration_s, const std::vector<int>& n_values = {1, 16, 64});

nlohmann::json to_json(const BenchReport& r);

}  // namespace color::cli

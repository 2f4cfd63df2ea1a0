#include "color/cli/bench.hpp"

#include <chrono>

#include "color/cli/evaluate.hpp"
#include "color/cli/mapgen.hpp"
#include "color/errors.hpp"
#include "color/vec_env.hpp"

namespace color::cli {

using Clock = std::chrono::steady_clock;

BenchReport run_bench(const RunConfig& cfg, double duration_s, const std::vector<int>& n_values) {
  if (!(duration_s > 0.0)) throw ConfigError("bench duration must be positive");
  if (n_values.empty()) throw ConfigError("bench needs at least one N");
  std::vector<sim::GridMap> maps = load_maps(expand_map_paths(cfg.train_maps), nullptr);
  if (maps.empty()) maps.push_back(generate_map(MapGenOptions{}, 0));
  std::vector<sim::EnvConfig> env_cfgs;
  for (std::size_t m = 0; m < maps.size(); ++m) env_cfgs.push_back(cfg.training_env(m));

  BenchReport report;
  for (int n : n_values) {
    if (n < 1) throw ConfigError("bench N must be >= 1");
    VecEnv envs(static_cast<std::size_t>(n), maps, env_cfgs, {cfg.training_ranges()}, cfg.env_workers);
    envs.reset_all(cfg.seed);
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(n)));
    std::uniform_int_distribution<int> pick(0, sim::kNumActions - 1);
    std::vector<int> actions(static_cast<std::size_t>(n));

    BenchEntry e;
    e.n_envs = n;
    e.per_copy_steps.assign(static_cast<std::size_t>(n), 0);
    const auto start = Clock::now();
    const auto budget = std::chrono::duration<double>(duration_s);
    while (Clock::now() - start < budget) {
      for (auto& a : actions) a = pick(rng);
      envs.step_batch(actions);
      for (auto& c : e.per_copy_steps) ++c;
      e.steps += static_cast<std::uint64_t>(n);
    }
    e.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    e.simulated_seconds = envs.simulated_seconds();
    report.entries.push_back(std::move(e));
  }
  return report;
}

nlohmann::json to_json(const BenchReport& r) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"n_envs", e.n_envs},
                       {"wall_seconds", e.wall_seconds},
                       {"steps", e.steps},
                       {"steps_per_second", e.steps_per_second()},
                       {"per_copy_steps_per_second", e.per_copy_steps_per_second()},
                       {"per_copy_steps", e.per_copy_steps},
                       {"simulated_seconds", e.simulated_seconds},
                       {"rtf", e.rtf()}});
  }
  return {{"entries", entries}};
}

}  // namespace color::cli

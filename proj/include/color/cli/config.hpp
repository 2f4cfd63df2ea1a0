#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "color/asl/tfm.hpp"
#include "color/asl/vem.hpp"
#include "color/ddqn.hpp"
#include "color/sim/sparrow_env.hpp"

namespace color::cli {

enum class Mode { grey, color, custom };

/// Everything needed to reproduce a training run. Loaded from a flat
/// `key = value` file with `[section]` headers; arrays are comma lists.
struct RunConfig {
  Mode mode = Mode::color;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "runs";
  std::string name;  // run directory name; empty -> "<mode>-seed<seed>"
  std::vector<std::filesystem::path> train_maps;  // files or directories of *.map
  std::vector<std::filesystem::path> test_maps;

  // [asl]
  int n_envs = 16;
  std::uint64_t max_steps = 300'000;
  double tps = 256.0;
  int batch = 256;
  std::size_t learning_start = 30'000;
  std::uint64_t upload_period = 50;
  std::size_t buffer_capacity = 1'000'000;
  double ema_factor = 0.1;
  std::uint64_t warmup_samples = 10;
  double max_sleep_s = 1.0;
  unsigned env_workers = 1;

  // [vem]
  int or_init = 0;  // 0 -> n_envs (every copy starts in the exploring interval)
  int or_final = 3;
  std::uint64_t or_decay_steps = 500'000;
  double e_min = 0.01;
  double e_max = 0.8;

  // [ddqn]
  double gamma = 0.98;
  double lr = 1e-4;
  std::uint64_t target_sync = 200;

  // [sim]
  sim::SimParams nominal{};
  double diversity = 0.3;
  int delay_spread = 1;
  sim::EnvConfig env{};
  /// Random obstacles added to map 0 at every reset.
  int map0_obstacles = 0;

  // [eval]
  std::uint64_t eval_interval_bsteps = 5'000;  // 0 disables periodic evaluation
  int eval_episodes = 10;
  int final_eval_episodes = 20;  // 0 skips the final evaluation
  double metrics_interval_s = 1.0;

  void validate() const;

  asl::TfmConfig tfm() const;
  asl::VemSchedule vem() const;
  DdqnConfig ddqn() const;
  /// Diversity ranges for training copies under the configured mode.
  sim::DiversityRanges training_ranges() const;
  /// EnvConfig for copies assigned to map `map_index` during training.
  sim::EnvConfig training_env(std::size_t map_index) const;
  std::string run_name() const;
};

std::string to_string(Mode m);

/// Parses a config; relative paths resolve against `base_dir`. Unknown
/// sections or keys are rejected with ConfigError.
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
/// Writes every key with its resolved value; parse_config reads it back.
void write_config(std::ostream& out, const RunConfig& cfg);

/// Expands directories to their sorted *.map files.
std::vector<std::filesystem::path> expand_map_paths(const std::vector<std::filesystem::path>& entries);

}  // namespace color::cli

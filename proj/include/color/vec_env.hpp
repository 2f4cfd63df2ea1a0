#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "color/rng.hpp"
#include "color/sim/sparrow_env.hpp"

namespace color {

class WorkerPool;

/// Row-major N x 32 state batch.
using StateBatch = std::vector<sim::State>;

struct BatchStep {
  StateBatch next_states;      // row fed to the next policy call (post-reset on episode end)
  StateBatch terminal_states;  // true s' for storage (pre-reset)
  std::vector<float> rewards;
  std::vector<std::uint8_t> dones;      // collision or arrival only
  std::vector<std::uint8_t> truncated;  // timeout
  std::vector<sim::Event> events;
};

struct CopyStats {
  std::uint64_t episodes = 0;
  std::uint64_t arrivals = 0;
  double return_sum = 0.0;

  std::optional<double> arrival_rate() const {
    if (episodes == 0) return std::nullopt;
    return static_cast<double>(arrivals) / static_cast<double>(episodes);
  }
};

struct StatsReport {
  std::vector<CopyStats> per_copy;
  CopyStats pooled;
};

/// Finished-episode notification: copy index, undiscounted return, arrived.
using EpisodeCallback = std::function<void(std::size_t, double, bool)>;

/// N independent Sparrow copies stepped in lockstep with automatic reset.
class VecEnv {
 public:
  /// `maps[i % maps.size()]` and `ranges[i % ranges.size()]` go to copy i.
  /// `workers` <= 1 steps copies inline on the calling thread.
  VecEnv(std::size_t n_copies, const std::vector<sim::GridMap>& maps, const sim::EnvConfig& cfg,
         const std::vector<sim::DiversityRanges>& ranges, unsigned workers = 1);
  /// Per-map environment settings: copy i uses `cfgs[map_index(i) % cfgs.size()]`.
  VecEnv(std::size_t n_copies, const std::vector<sim::GridMap>& maps, const std::vector<sim::EnvConfig>& cfgs,
         const std::vector<sim::DiversityRanges>& ranges, unsigned workers = 1);
  ~VecEnv();
  VecEnv(const VecEnv&) = delete;
  VecEnv& operator=(const VecEnv&) = delete;

  std::size_t size() const { return envs_.size(); }

  StateBatch reset_all(std::uint64_t seed);
  BatchStep step_batch(std::span<const int> actions);

  StatsReport snapshot_stats() const;
  void reset_stats();
  void set_episode_callback(EpisodeCallback cb) { on_episode_ = std::move(cb); }

  const sim::SparrowEnv& env(std::size_t i) const { return envs_[i]; }
  sim::SparrowEnv& env(std::size_t i) { return envs_[i]; }
  std::size_t map_index(std::size_t i) const { return map_index_[i]; }
  /// Sum of simulated seconds advanced over all copies.
  double simulated_seconds() const;

 private:
  void step_one(std::size_t i, int action, BatchStep& out);

  std::vector<sim::SparrowEnv> envs_;
  std::vector<Rng> rngs_;
  std::vector<std::size_t> map_index_;
  std::vector<double> episode_return_;
  std::vector<CopyStats> stats_;
  std::vector<double> sim_seconds_;
  std::unique_ptr<WorkerPool> pool_;
  EpisodeCallback on_episode_;
};

/// Fixed-size pool that runs `fn(i)` for i in [0, n) and blocks until done.
class WorkerPool {
 public:
  explicit WorkerPool(unsigned threads);
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  unsigned threads() const { return static_cast<unsigned>(threads_.size()); }
  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

 private:
  struct Shared;
  std::unique_ptr<Shared> shared_;
  std::vector<std::thread> threads_;
};

}  // namespace color

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>

#include "color/cli/config.hpp"
#include "color/cli/evaluate.hpp"
#include "color/vec_env.hpp"

namespace color::cli {

inline constexpr const char* kMetricsHeader =
    "wall_time_s,T_step,B_step,measured_TPS,xi_ms,epsilon_min_active,buffer_size,recent_arrival_rate,"
    "recent_mean_return";

struct TrainResult {
  std::filesystem::path run_dir;
  std::uint64_t t_step = 0;
  std::uint64_t b_step = 0;
  double wall_seconds = 0.0;
  std::size_t metrics_rows = 0;
  std::optional<double> best_train_rate;
  /// Final greedy evaluation of the last model (absent when final_episodes = 0).
  std::optional<EvalReport> final_eval;
  /// Same protocol for the best-by-training-arrival-rate checkpoint.
  std::optional<EvalReport> best_eval;
};

/// Output root: $COLOR_OUT_DIR when set, otherwise cfg.out_dir.
std::filesystem::path output_root(const RunConfig& cfg);

/// Training copies: grey puts every copy on map 0 with zero-width ranges;
/// color and custom assign maps round-robin with the configured ranges.
std::unique_ptr<VecEnv> make_training_envs(const RunConfig& cfg, const std::vector<sim::GridMap>& maps);

/// Runs one Actor/Learner training session and writes into
/// <root>/<run name>: resolved_config.ini, metrics.csv, eval.csv,
/// ckpt_latest.bin, ckpt_best.bin and report.json. Progress lines go to `log`
/// when given.
TrainResult run_training(const RunConfig& cfg, std::ostream* log = nullptr);

}  // namespace color::cli

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>

#include "color/asl/tfm.hpp"
#include "color/nn/mlp.hpp"
#include "color/replay_buffer.hpp"

namespace color::asl {

/// Immutable published model. `sequence` counts publications.
struct PublishedModel {
  nn::NetworkParams params;
  std::uint64_t sequence = 0;
  std::uint64_t checksum = 0;
};

struct EpisodeWindowStats {
  std::size_t episodes = 0;
  std::optional<double> arrival_rate;
  std::optional<double> mean_return;
};

/// Requests sleeps shortened by the running mean of past oversleep, so the
/// achieved pause tracks the TFM decision despite scheduler wake-up latency.
class SleepCompensator {
 public:
  explicit SleepCompensator(double ema_factor = 0.1) : ema_(ema_factor) {}
  /// Duration to pass to the sleep call for a desired pause.
  double request(double desired_s) const { return std::max(0.0, desired_s - bias_s_); }
  void observe(double requested_s, double actual_s) { bias_s_ = (1.0 - ema_) * bias_s_ + ema_ * (actual_s - requested_s); }
  double bias_s() const { return bias_s_; }

 private:
  double ema_;
  double bias_s_ = 0.0;
};

/// State shared between the Actor and the Learner: replay memory, the
/// published model, loop period statistics and the step counters.
class Sharer {
 public:
  Sharer(nn::NetworkParams initial, std::size_t replay_capacity, TfmConfig tfm, std::size_t episode_window = 100);

  ReplayBuffer& replay() { return replay_; }
  const ReplayBuffer& replay() const { return replay_; }
  const TfmConfig& tfm_config() const { return tfm_cfg_; }
  TfmState& tfm() { return tfm_; }
  const TfmState& tfm() const { return tfm_; }

  /// Copies `params` into a fresh snapshot and swaps it in whole.
  void publish(const nn::NetworkParams& params);
  std::shared_ptr<const PublishedModel> latest() const;
  std::uint64_t published_sequence() const { return published_seq_.load(std::memory_order_acquire); }

  std::optional<double> xi() const { return compute_xi(tfm_, tfm_cfg_); }

  std::uint64_t t_step() const { return t_step_.load(std::memory_order_acquire); }
  std::uint64_t b_step() const { return b_step_.load(std::memory_order_acquire); }
  void add_t_steps(std::uint64_t n) { t_step_.fetch_add(n, std::memory_order_acq_rel); }
  void add_b_step() { b_step_.fetch_add(1, std::memory_order_acq_rel); }

  void request_stop();
  bool stop_requested() const { return stop_.load(std::memory_order_acquire); }
  /// Sleeps up to `seconds`, returning early once a stop is requested.
  void interruptible_sleep(double seconds);
  /// Compensated sleep for a desired pause; feeds the measured overrun back.
  void compensated_sleep(double desired_s, SleepCompensator& comp);

  void record_episode(double episode_return, bool arrived);
  EpisodeWindowStats recent_episodes() const;

 private:
  ReplayBuffer replay_;
  TfmConfig tfm_cfg_;
  TfmState tfm_;

  mutable std::mutex model_mu_;
  std::shared_ptr<const PublishedModel> model_;
  std::atomic<std::uint64_t> published_seq_{0};

  std::atomic<std::uint64_t> t_step_{0};
  std::atomic<std::uint64_t> b_step_{0};

  std::atomic<bool> stop_{false};
  std::mutex stop_mu_;
  std::condition_variable stop_cv_;

  mutable std::mutex episodes_mu_;
  std::deque<std::pair<double, bool>> episodes_;
  std::size_t episode_window_;
};

}  // namespace color::asl

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>

#include "color/asl/sharer.hpp"
#include "color/asl/vem.hpp"
#include "color/vec_env.hpp"

namespace color::asl {

struct UpdateStats {
  double loss = 0.0;
  double mean_abs_td = 0.0;
  std::uint64_t target_version = 0;
};

/// Underlying off-policy algorithm driven by the Learner.
class LearnerAlgorithm {
 public:
  virtual ~LearnerAlgorithm() = default;
  virtual UpdateStats update(const TransitionBatch& batch) = 0;
  /// Parameters the Actor should act with once published.
  virtual const nn::NetworkParams& policy_params() const = 0;
};

struct ActorConfig {
  std::uint64_t max_steps = 300'000;  // T
  std::uint64_t seed = 0;
  /// Instrumentation: extra latency added inside the measured interaction.
  std::chrono::duration<double> artificial_latency{0.0};
};

struct LearnerConfig {
  std::size_t batch = 256;
  std::size_t learning_start = 30'000;  // C
  std::uint64_t upload_period = 50;     // U
  std::uint64_t seed = 1;
  std::chrono::duration<double> artificial_latency{0.0};
};

/// Collects transitions from the vectorized environment with the latest
/// published policy.
class Actor {
 public:
  Actor(Sharer& sharer, VecEnv& envs, VemSchedule vem, ActorConfig cfg);

  /// Resets the environments and runs until T_step >= T or a stop request.
  /// Requests a stop on exit so the Learner winds down.
  void run();

  std::uint64_t iterations() const { return iterations_.load(std::memory_order_relaxed); }
  std::uint64_t sleeps() const { return sleeps_.load(std::memory_order_relaxed); }
  /// Sequence of the model used in the most recent iteration.
  std::uint64_t model_sequence() const { return model_seq_.load(std::memory_order_relaxed); }
  /// Hook run after each iteration on the Actor thread (instrumentation).
  void set_iteration_hook(std::function<void(const Actor&)> hook) { hook_ = std::move(hook); }

 private:
  Sharer& sharer_;
  VecEnv& envs_;
  VemSchedule vem_;
  ActorConfig cfg_;
  std::atomic<std::uint64_t> iterations_{0};
  std::atomic<std::uint64_t> sleeps_{0};
  std::atomic<std::uint64_t> model_seq_{0};
  std::function<void(const Actor&)> hook_;
};

/// Samples minibatches and optimizes once the replay holds more than C
/// transitions; publishes the model every U optimization steps.
class Learner {
 public:
  Learner(Sharer& sharer, LearnerAlgorithm& algo, LearnerConfig cfg);

  void run();

  std::uint64_t updates() const { return updates_.load(std::memory_order_relaxed); }
  std::uint64_t sleeps() const { return sleeps_.load(std::memory_order_relaxed); }
  UpdateStats last_stats() const;

 private:
  Sharer& sharer_;
  LearnerAlgorithm& algo_;
  LearnerConfig cfg_;
  std::atomic<std::uint64_t> updates_{0};
  std::atomic<std::uint64_t> sleeps_{0};
  mutable std::mutex stats_mu_;
  UpdateStats last_{};
};

/// Runs Actor and Learner on two threads. `monitor` is polled on the calling
/// thread every `poll` until both loops finish. Rethrows the first loop error.
void run_concurrently(Sharer& sharer, Actor& actor, Learner& learner, const std::function<void()>& monitor = {},
                      std::chrono::milliseconds poll = std::chrono::milliseconds(50));

}  // namespace color::asl

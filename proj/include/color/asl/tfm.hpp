#pragma once

#include <atomic>
#include <cstdint>
#include <optional>

namespace color::asl {

/// Target data utilisation. rho = N * TPS / B relates the two loop periods:
/// balance holds when V_step^T = rho * B_step^T.
struct TfmConfig {
  int n_envs = 16;
  double tps = 256.0;
  int batch = 256;
  double ema_factor = 0.1;
  /// Samples each loop must report before any sleeping happens.
  std::uint64_t warmup_samples = 10;
  double max_sleep_s = 1.0;

  double rho() const { return static_cast<double>(n_envs) * tps / static_cast<double>(batch); }
  void validate() const;
};

/// Exponential moving averages of the interaction and optimization periods.
/// Each period has exactly one writer (its loop); readers may see values up
/// to one iteration stale.
class TfmState {
 public:
  explicit TfmState(double ema_factor = 0.1) : ema_(ema_factor) {}

  void report_interaction(double seconds) { update(v_period_, v_samples_, seconds); }
  void report_optimization(double seconds) { update(b_period_, b_samples_, seconds); }

  double v_period_s() const { return v_period_.load(std::memory_order_relaxed); }
  double b_period_s() const { return b_period_.load(std::memory_order_relaxed); }
  std::uint64_t v_samples() const { return v_samples_.load(std::memory_order_relaxed); }
  std::uint64_t b_samples() const { return b_samples_.load(std::memory_order_relaxed); }

 private:
  void update(std::atomic<double>& period, std::atomic<std::uint64_t>& count, double sample) {
    const auto n = count.load(std::memory_order_relaxed);
    const double prev = period.load(std::memory_order_relaxed);
    period.store(n == 0 ? sample : (1.0 - ema_) * prev + ema_ * sample, std::memory_order_relaxed);
    count.store(n + 1, std::memory_order_relaxed);
  }

  double ema_;
  std::atomic<double> v_period_{0.0};
  std::atomic<double> b_period_{0.0};
  std::atomic<std::uint64_t> v_samples_{0};
  std::atomic<std::uint64_t> b_samples_{0};
};

/// xi = rho * B_step^T - V_step^T, in seconds. Positive: the Actor is ahead
/// and sleeps xi; otherwise the Learner sleeps -xi / rho.
inline double compute_xi(double v_period_s, double b_period_s, double rho) { return rho * b_period_s - v_period_s; }

/// xi from the current state, or nullopt while either loop is still warming up.
std::optional<double> compute_xi(const TfmState& state, const TfmConfig& cfg);

struct SleepDecision {
  double actor_s = 0.0;
  double learner_s = 0.0;
};

/// Which side sleeps for a given xi (at most one of the two is non-zero).
SleepDecision sleep_for_xi(double xi, const TfmConfig& cfg);

}  // namespace color::asl

#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "color/rng.hpp"
#include "color/sim/sparrow_env.hpp"

namespace color {

inline constexpr std::size_t kStateDim = sim::kStateDim;

/// Column-major batch of (s, a, r, s', done) records; states are row-major
/// `size() x 32` float blocks.
struct TransitionBatch {
  std::vector<float> states;
  std::vector<std::int32_t> actions;
  std::vector<float> rewards;
  std::vector<float> next_states;
  std::vector<std::uint8_t> dones;

  std::size_t size() const { return actions.size(); }
  void resize(std::size_t n);

  using StateMap = Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  StateMap state_matrix() const { return {states.data(), static_cast<Eigen::Index>(size()), kStateDim}; }
  StateMap next_state_matrix() const { return {next_states.data(), static_cast<Eigen::Index>(size()), kStateDim}; }
};

/// Fixed-capacity FIFO transition store with uniform sampling.
///
/// One appender and one sampler may run concurrently. A batch append is
/// observed atomically by `sample`, so a sampled row is always one complete
/// transition.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return size_.load(std::memory_order_acquire); }
  /// Total transitions ever appended.
  std::uint64_t total_appended() const { return total_.load(std::memory_order_acquire); }

  void append_batch(const TransitionBatch& batch);
  /// Draws `count` rows uniformly with replacement. Throws NotReadyError when
  /// fewer than `count` transitions are stored.
  void sample(std::size_t count, Rng& rng, TransitionBatch& out) const;
  TransitionBatch sample(std::size_t count, Rng& rng) const;

  /// Copies physical slot `slot` (test and tooling access).
  TransitionBatch read_slot(std::size_t slot) const;
  std::size_t write_cursor() const;

 private:
  void copy_row(std::size_t slot, std::size_t dst_row, TransitionBatch& out) const;

  std::size_t capacity_;
  std::vector<float> states_;
  std::vector<std::int32_t> actions_;
  std::vector<float> rewards_;
  std::vector<float> next_states_;
  std::vector<std::uint8_t> dones_;
  std::size_t cursor_ = 0;
  std::atomic<std::size_t> size_{0};
  std::atomic<std::uint64_t> total_{0};
  mutable std::mutex mu_;
};

}  // namespace color

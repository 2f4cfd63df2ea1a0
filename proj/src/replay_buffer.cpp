#include "color/replay_buffer.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

#include "color/errors.hpp"

namespace color {

void TransitionBatch::resize(std::size_t n) {
  states.resize(n * kStateDim);
  actions.resize(n);
  rewards.resize(n);
  next_states.resize(n * kStateDim);
  dones.resize(n);
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
  states_.resize(capacity * kStateDim);
  actions_.resize(capacity);
  rewards_.resize(capacity);
  next_states_.resize(capacity * kStateDim);
  dones_.resize(capacity);
}

void ReplayBuffer::append_batch(const TransitionBatch& batch) {
  const std::size_t n = batch.size();
  if (n > capacity_) throw std::invalid_argument("batch larger than replay capacity");
  if (batch.states.size() != n * kStateDim || batch.next_states.size() != n * kStateDim ||
      batch.rewards.size() != n || batch.dones.size() != n) {
    throw std::invalid_argument("transition batch columns disagree in length");
  }
  std::lock_guard lock(mu_);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t slot = cursor_;
    std::memcpy(&states_[slot * kStateDim], &batch.states[i * kStateDim], kStateDim * sizeof(float));
    std::memcpy(&next_states_[slot * kStateDim], &batch.next_states[i * kStateDim], kStateDim * sizeof(float));
    actions_[slot] = batch.actions[i];
    rewards_[slot] = batch.rewards[i];
    dones_[slot] = batch.dones[i];
    cursor_ = cursor_ + 1 == capacity_ ? 0 : cursor_ + 1;
  }
  size_.store(std::min(capacity_, size_.load(std::memory_order_relaxed) + n), std::memory_order_release);
  total_.fetch_add(n, std::memory_order_release);
}

void ReplayBuffer::copy_row(std::size_t slot, std::size_t dst, TransitionBatch& out) const {
  std::memcpy(&out.states[dst * kStateDim], &states_[slot * kStateDim], kStateDim * sizeof(float));
  std::memcpy(&out.next_states[dst * kStateDim], &next_states_[slot * kStateDim], kStateDim * sizeof(float));
  out.actions[dst] = actions_[slot];
  out.rewards[dst] = rewards_[slot];
  out.dones[dst] = dones_[slot];
}

void ReplayBuffer::sample(std::size_t count, Rng& rng, TransitionBatch& out) const {
  out.resize(count);
  std::lock_guard lock(mu_);
  const std::size_t n = size_.load(std::memory_order_relaxed);
  if (n < count || n == 0) {
    throw NotReadyError("replay holds " + std::to_string(n) + " transitions, " + std::to_string(count) + " requested");
  }
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t i = 0; i < count; ++i) copy_row(pick(rng), i, out);
}

TransitionBatch ReplayBuffer::sample(std::size_t count, Rng& rng) const {
  TransitionBatch out;
  sample(count, rng, out);
  return out;
}

TransitionBatch ReplayBuffer::read_slot(std::size_t slot) const {
  if (slot >= capacity_) throw std::out_of_range("replay slot out of range");
  TransitionBatch out;
  out.resize(1);
  std::lock_guard lock(mu_);
  copy_row(slot, 0, out);
  return out;
}

std::size_t ReplayBuffer::write_cursor() const {
  std::lock_guard lock(mu_);
  return cursor_;
}

}  // namespace color

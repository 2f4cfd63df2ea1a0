#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "color/rng.hpp"

namespace color::asl {

/// Vectorized epsilon-greedy exploration: copies [0, N - OR) exploit at
/// e_min; the exploring interval [N - OR, N) ramps linearly from e_min to
/// e_max. OR shrinks linearly from or_init to or_final over decay_steps.
struct VemSchedule {
  int n_envs = 16;
  int or_init = 16;
  int or_final = 3;
  std::uint64_t decay_steps = 500'000;
  double e_min = 0.01;
  double e_max = 0.8;

  /// Throws ConfigError on violated ordering constraints.
  void validate() const;

  /// Size of the exploring interval at T_step `t`.
  int exploring_size(std::uint64_t t) const;
  /// Copies currently pinned to e_min.
  int exploiting_size(std::uint64_t t) const { return n_envs - exploring_size(t); }
  double epsilon(int env_index, std::uint64_t t) const;
  std::vector<double> epsilons(std::uint64_t t) const;
};

/// Row-wise epsilon-greedy selection over an N x n_actions row-major Q table.
/// Greedy ties resolve to the lowest action index.
std::vector<int> select_actions(std::span<const float> q_values, int n_actions, std::span<const double> epsilons,
                                Rng& rng);

int argmax_row(std::span<const float> row);

}  // namespace color::asl

#pragma once

#include <cstdint>
#include <vector>

#include "color/asl/loops.hpp"
#include "color/nn/mlp.hpp"
#include "color/replay_buffer.hpp"

namespace color {

struct DdqnConfig {
  double gamma = 0.98;
  std::uint64_t target_sync_period = 200;  // optimization steps
  nn::AdamConfig adam{};

  void validate() const;
};

/// Double-DQN targets: y = r + gamma (1 - done) Q_target(s', argmax_a Q_online(s', a)).
/// Argmax ties resolve to the lowest action index.
std::vector<float> compute_targets(const TransitionBatch& batch, const nn::NetworkParams& online,
                                   const nn::NetworkParams& target, double gamma);

/// Online/target network pair with Adam, updated on replayed minibatches.
class DdqnLearner final : public asl::LearnerAlgorithm {
 public:
  DdqnLearner(nn::NetworkParams initial, DdqnConfig cfg);

  asl::UpdateStats update(const TransitionBatch& batch) override;
  const nn::NetworkParams& policy_params() const override { return online_; }

  const nn::NetworkParams& online() const { return online_; }
  const nn::NetworkParams& target() const { return target_; }
  std::uint64_t updates() const { return updates_; }
  const DdqnConfig& config() const { return cfg_; }

 private:
  DdqnConfig cfg_;
  nn::NetworkParams online_;
  nn::NetworkParams target_;
  nn::AdamState<float> adam_;
  nn::NetworkParams grads_;
  std::uint64_t updates_ = 0;
};

}  // namespace color

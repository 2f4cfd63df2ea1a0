#include "color/ddqn.hpp"

#include <cmath>

#include "color/asl/vem.hpp"
#include "color/errors.hpp"

namespace color {

void DdqnConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  if (target_sync_period == 0) throw ConfigError("target sync period must be positive");
  if (!(adam.lr > 0.0)) throw ConfigError("learning rate must be positive");
}

std::vector<float> compute_targets(const TransitionBatch& batch, const nn::NetworkParams& online,
                                   const nn::NetworkParams& target, double gamma) {
  const auto next = batch.next_state_matrix();
  const nn::Matrix<float> q_online = nn::forward(online, next);
  const nn::Matrix<float> q_target = nn::forward(target, next);
  const auto n_actions = static_cast<std::size_t>(q_online.cols());
  std::vector<float> y(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const int best = asl::argmax_row({q_online.row(row).data(), n_actions});
    const float bootstrap = batch.dones[i] ? 0.0f : static_cast<float>(gamma) * q_target(row, best);
    y[i] = batch.rewards[i] + bootstrap;
  }
  return y;
}

DdqnLearner::DdqnLearner(nn::NetworkParams initial, DdqnConfig cfg)
    : cfg_(cfg), online_(std::move(initial)), target_(online_) {
  cfg_.validate();
  adam_ = nn::AdamState<float>::for_params(online_, cfg_.adam);
}

asl::UpdateStats DdqnLearner::update(const TransitionBatch& batch) {
  const auto y = compute_targets(batch, online_, target_, cfg_.gamma);
  const auto states = batch.state_matrix();
  asl::UpdateStats stats;
  nn::Matrix<float> q;
  stats.loss = nn::backward<float>(online_, states, batch.actions, y, grads_, &q);
  nn::adam_step(online_, grads_, adam_);
  if (!online_.all_finite()) throw TrainingError("non-finite network parameters after update");
  ++updates_;
  if (updates_ % cfg_.target_sync_period == 0) nn::sync_target(online_, target_);

  // TD error of the network before this step
  double abs_td = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    abs_td += std::abs(q(static_cast<Eigen::Index>(i), batch.actions[i]) - y[i]);
  }
  stats.mean_abs_td = batch.size() ? abs_td / static_cast<double>(batch.size()) : 0.0;
  stats.target_version = target_.version;
  return stats;
}

}  // namespace color

#include "color/asl/sharer.hpp"

#include <algorithm>

#include "color/errors.hpp"

namespace color::asl {

void TfmConfig::validate() const {
  if (n_envs < 1 || batch < 1) throw ConfigError("TFM needs N >= 1 and B >= 1");
  if (!(tps > 0.0)) throw ConfigError("TPS must be positive");
  if (!(ema_factor > 0.0 && ema_factor < 1.0)) throw ConfigError("TFM EMA factor must lie in (0, 1)");
  if (!(max_sleep_s > 0.0)) throw ConfigError("TFM sleep cap must be positive");
}

std::optional<double> compute_xi(const TfmState& state, const TfmConfig& cfg) {
  if (state.v_samples() < cfg.warmup_samples || state.b_samples() < cfg.warmup_samples) return std::nullopt;
  if (state.v_samples() == 0 || state.b_samples() == 0) return std::nullopt;
  return compute_xi(state.v_period_s(), state.b_period_s(), cfg.rho());
}

SleepDecision sleep_for_xi(double xi, const TfmConfig& cfg) {
  SleepDecision d;
  if (xi > 0.0) {
    d.actor_s = std::min(xi, cfg.max_sleep_s);
  } else {
    d.learner_s = std::min(-xi / cfg.rho(), cfg.max_sleep_s);
  }
  return d;
}

Sharer::Sharer(nn::NetworkParams initial, std::size_t replay_capacity, TfmConfig tfm, std::size_t episode_window)
    : replay_(replay_capacity), tfm_cfg_(tfm), tfm_(tfm.ema_factor), episode_window_(episode_window) {
  tfm_cfg_.validate();
  auto model = std::make_shared<PublishedModel>();
  model->checksum = initial.checksum();
  model->params = std::move(initial);
  model_ = std::move(model);
}

void Sharer::publish(const nn::NetworkParams& params) {
  auto model = std::make_shared<PublishedModel>();
  model->params = params;
  model->checksum = model->params.checksum();
  std::lock_guard lock(model_mu_);
  model->sequence = published_seq_.load(std::memory_order_relaxed) + 1;
  model_ = std::move(model);
  published_seq_.store(model_->sequence, std::memory_order_release);
}

std::shared_ptr<const PublishedModel> Sharer::latest() const {
  std::lock_guard lock(model_mu_);
  return model_;
}

void Sharer::request_stop() {
  {
    std::lock_guard lock(stop_mu_);
    stop_.store(true, std::memory_order_release);
  }
  stop_cv_.notify_all();
}

void Sharer::interruptible_sleep(double seconds) {
  if (seconds <= 0.0) return;
  std::unique_lock lock(stop_mu_);
  stop_cv_.wait_for(lock, std::chrono::duration<double>(seconds),
                    [this] { return stop_.load(std::memory_order_acquire); });
}

void Sharer::compensated_sleep(double desired_s, SleepCompensator& comp) {
  const double req = comp.request(desired_s);
  if (req <= 0.0) {
    comp.observe(0.0, 0.0);  // decay so a stale bias cannot suppress sleeping forever
    return;
  }
  const auto t0 = std::chrono::steady_clock::now();
  interruptible_sleep(req);
  if (stop_requested()) return;
  comp.observe(req, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

void Sharer::record_episode(double episode_return, bool arrived) {
  std::lock_guard lock(episodes_mu_);
  episodes_.emplace_back(episode_return, arrived);
  while (episodes_.size() > episode_window_) episodes_.pop_front();
}

EpisodeWindowStats Sharer::recent_episodes() const {
  std::lock_guard lock(episodes_mu_);
  EpisodeWindowStats s;
  s.episodes = episodes_.size();
  if (episodes_.empty()) return s;
  double ret = 0.0;
  std::size_t arrivals = 0;
  for (const auto& [r, a] : episodes_) {
    ret += r;
    arrivals += a ? 1 : 0;
  }
  s.arrival_rate = static_cast<double>(arrivals) / static_cast<double>(episodes_.size());
  s.mean_return = ret / static_cast<double>(episodes_.size());
  return s;
}

}  // namespace color::asl

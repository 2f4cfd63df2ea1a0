#include "color/vec_env.hpp"

#include <atomic>
#include <condition_variable>
#include <mutex>
#include <stdexcept>

#include "color/errors.hpp"

namespace color {

struct WorkerPool::Shared {
  std::mutex mu;
  std::condition_variable start_cv;
  std::condition_variable done_cv;
  const std::function<void(std::size_t)>* fn = nullptr;
  std::size_t n = 0;
  std::atomic<std::size_t> next{0};
  std::uint64_t generation = 0;
  unsigned active = 0;
  bool stop = false;

  void drain() {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) (*fn)(i);
  }
};

WorkerPool::WorkerPool(unsigned threads) : shared_(std::make_unique<Shared>()) {
  for (unsigned t = 0; t < threads; ++t) {
    threads_.emplace_back([s = shared_.get()] {
      std::uint64_t seen = 0;
      for (;;) {
        {
          std::unique_lock lock(s->mu);
          s->start_cv.wait(lock, [&] { return s->stop || s->generation != seen; });
          if (s->stop) return;
          seen = s->generation;
        }
        s->drain();
        std::lock_guard lock(s->mu);
        if (--s->active == 0) s->done_cv.notify_one();
      }
    });
  }
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(shared_->mu);
    shared_->stop = true;
  }
  shared_->start_cv.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  auto& s = *shared_;
  {
    std::lock_guard lock(s.mu);
    s.fn = &fn;
    s.n = n;
    s.next = 0;
    s.active = static_cast<unsigned>(threads_.size());
    ++s.generation;
  }
  s.start_cv.notify_all();
  s.drain();
  std::unique_lock lock(s.mu);
  s.done_cv.wait(lock, [&] { return s.active == 0; });
}

VecEnv::VecEnv(std::size_t n_copies, const std::vector<sim::GridMap>& maps, const sim::EnvConfig& cfg,
               const std::vector<sim::DiversityRanges>& ranges, unsigned workers)
    : VecEnv(n_copies, maps, std::vector<sim::EnvConfig>{cfg}, ranges, workers) {}

VecEnv::VecEnv(std::size_t n_copies, const std::vector<sim::GridMap>& maps, const std::vector<sim::EnvConfig>& cfgs,
               const std::vector<sim::DiversityRanges>& ranges, unsigned workers) {
  if (cfgs.empty()) throw ConfigError("vectorized environment needs an environment config");
  if (n_copies == 0) throw ConfigError("vectorized environment needs at least one copy");
  if (maps.empty()) throw ConfigError("vectorized environment needs at least one map");
  if (ranges.empty()) throw ConfigError("vectorized environment needs diversity ranges");
  envs_.reserve(n_copies);
  for (std::size_t i = 0; i < n_copies; ++i) {
    const std::size_t m = i % maps.size();
    map_index_.push_back(m);
    envs_.emplace_back(maps[m], cfgs[m % cfgs.size()], ranges[i % ranges.size()]);
  }
  rngs_.resize(n_copies);
  episode_return_.assign(n_copies, 0.0);
  stats_.assign(n_copies, {});
  sim_seconds_.assign(n_copies, 0.0);
  // the calling thread participates, so `workers` threads total
  if (workers > 1 && n_copies > 1) pool_ = std::make_unique<WorkerPool>(workers - 1);
}

VecEnv::~VecEnv() = default;

StateBatch VecEnv::reset_all(std::uint64_t seed) {
  StateBatch states(envs_.size());
  for (std::size_t i = 0; i < envs_.size(); ++i) {
    rngs_[i].seed(derive_seed(seed, i));
    states[i] = envs_[i].reset(rngs_[i]);
    episode_return_[i] = 0.0;
  }
  return states;
}

void VecEnv::step_one(std::size_t i, int action, BatchStep& out) {
  auto& env = envs_[i];
  const double dt = env.params().control_interval_s;
  const auto res = env.step(action, rngs_[i]);
  sim_seconds_[i] += dt;
  out.terminal_states[i] = res.state;
  out.rewards[i] = static_cast<float>(res.reward);
  out.dones[i] = res.done ? 1 : 0;
  out.truncated[i] = res.truncated ? 1 : 0;
  out.events[i] = res.event;
  out.next_states[i] = (res.done || res.truncated) ? env.reset(rngs_[i]) : res.state;
}

BatchStep VecEnv::step_batch(std::span<const int> actions) {
  const std::size_t n = envs_.size();
  if (actions.size() != n) {
    throw UsageError("step_batch expects " + std::to_string(n) + " actions, got " + std::to_string(actions.size()));
  }
  for (int a : actions) {
    if (a < 0 || a >= sim::kNumActions) throw UsageError("action index " + std::to_string(a) + " outside 0..4");
  }
  BatchStep out;
  out.next_states.resize(n);
  out.terminal_states.resize(n);
  out.rewards.resize(n);
  out.dones.resize(n);
  out.truncated.resize(n);
  out.events.resize(n);

  if (pool_) {
    pool_->parallel_for(n, [&](std::size_t i) { step_one(i, actions[i], out); });
  } else {
    for (std::size_t i = 0; i < n; ++i) step_one(i, actions[i], out);
  }

  for (std::size_t i = 0; i < n; ++i) {
    episode_return_[i] += out.rewards[i];
    if (out.dones[i] || out.truncated[i]) {
      const bool arrived = out.events[i] == sim::Event::arrival;
      auto& st = stats_[i];
      ++st.episodes;
      if (arrived) ++st.arrivals;
      st.return_sum += episode_return_[i];
      if (on_episode_) on_episode_(i, episode_return_[i], arrived);
      episode_return_[i] = 0.0;
    }
  }
  return out;
}

StatsReport VecEnv::snapshot_stats() const {
  StatsReport r;
  r.per_copy = stats_;
  for (const auto& s : stats_) {
    r.pooled.episodes += s.episodes;
    r.pooled.arrivals += s.arrivals;
    r.pooled.return_sum += s.return_sum;
  }
  return r;
}

void VecEnv::reset_stats() { stats_.assign(envs_.size(), {}); }

double VecEnv::simulated_seconds() const {
  double total = 0.0;
  for (double s : sim_seconds_) total += s;
  return total;
}

}  // namespace color

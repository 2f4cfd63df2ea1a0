#include "color/asl/loops.hpp"

#include <cstring>
#include <exception>
#include <thread>

#include "color/errors.hpp"

namespace color::asl {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void inject_latency(std::chrono::duration<double> d) {
  if (d.count() > 0.0) std::this_thread::sleep_for(d);
}

}  // namespace

Actor::Actor(Sharer& sharer, VecEnv& envs, VemSchedule vem, ActorConfig cfg)
    : sharer_(sharer), envs_(envs), vem_(vem), cfg_(cfg) {
  vem_.validate();
  if (static_cast<std::size_t>(vem_.n_envs) != envs_.size()) {
    throw ConfigError("VEM schedule size does not match the number of environment copies");
  }
}

void Actor::run() {
  const std::size_t n = envs_.size();
  StateBatch states = envs_.reset_all(cfg_.seed);
  Rng rng(derive_seed(cfg_.seed, 0xAC70));
  envs_.set_episode_callback([this](std::size_t, double ret, bool arrived) { sharer_.record_episode(ret, arrived); });

  auto model = sharer_.latest();
  SleepCompensator pause;
  TransitionBatch batch;
  batch.resize(n);
  nn::Matrix<float> input(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(sim::kStateDim));

  try {
    while (sharer_.t_step() < cfg_.max_steps && !sharer_.stop_requested()) {
      const auto t0 = Clock::now();
      // 1. pick up a newer model if one was published
      if (sharer_.published_sequence() != model->sequence) model = sharer_.latest();
      model_seq_.store(model->sequence, std::memory_order_relaxed);
      // 2. batched greedy policy
      for (std::size_t i = 0; i < n; ++i) {
        std::memcpy(input.row(static_cast<Eigen::Index>(i)).data(), states[i].data(), sim::kStateDim * sizeof(float));
      }
      const nn::Matrix<float> q = nn::forward(model->params, input);
      // 3. VEM exploration
      const auto eps = vem_.epsilons(sharer_.t_step());
      const auto actions = select_actions({q.data(), static_cast<std::size_t>(q.size())}, sim::kNumActions, eps, rng);
      // 4. step every copy
      const BatchStep step = envs_.step_batch(actions);
      // 5. store (s, a, r, s', done) with the pre-reset s'
      for (std::size_t i = 0; i < n; ++i) {
        std::memcpy(&batch.states[i * kStateDim], states[i].data(), kStateDim * sizeof(float));
        std::memcpy(&batch.next_states[i * kStateDim], step.terminal_states[i].data(), kStateDim * sizeof(float));
        batch.actions[i] = actions[i];
        batch.rewards[i] = step.rewards[i];
        batch.dones[i] = step.dones[i];
      }
      sharer_.replay().append_batch(batch);
      inject_latency(cfg_.artificial_latency);
      // 6. report the interaction period (steps 1-5)
      sharer_.tfm().report_interaction(seconds_since(t0));
      // 7. sleep if the Actor is ahead
      if (const auto xi = sharer_.xi()) {
        const auto d = sleep_for_xi(*xi, sharer_.tfm_config());
        if (d.actor_s > 0.0) {
          sleeps_.fetch_add(1, std::memory_order_relaxed);
          sharer_.compensated_sleep(d.actor_s, pause);
        }
      }
      // 8. advance
      states = step.next_states;
      sharer_.add_t_steps(n);
      iterations_.fetch_add(1, std::memory_order_relaxed);
      if (hook_) hook_(*this);
    }
  } catch (...) {
    envs_.set_episode_callback({});
    sharer_.request_stop();
    throw;
  }
  envs_.set_episode_callback({});
  sharer_.request_stop();
}

Learner::Learner(Sharer& sharer, LearnerAlgorithm& algo, LearnerConfig cfg)
    : sharer_(sharer), algo_(algo), cfg_(cfg) {
  if (cfg_.batch == 0) throw ConfigError("learner batch size must be positive");
  if (cfg_.upload_period == 0) throw ConfigError("model upload period must be positive");
}

UpdateStats Learner::last_stats() const {
  std::lock_guard lock(stats_mu_);
  return last_;
}

void Learner::run() {
  Rng rng(derive_seed(cfg_.seed, 0x1EA7));
  SleepCompensator pause;
  TransitionBatch batch;
  try {
    while (!sharer_.stop_requested()) {
      const std::size_t size = sharer_.replay().size();
      if (size <= cfg_.learning_start || size < cfg_.batch) {
        sharer_.interruptible_sleep(0.001);
        continue;
      }
      const auto t0 = Clock::now();
      // 1. sample, 2. optimize, 3. upload every U steps
      sharer_.replay().sample(cfg_.batch, rng, batch);
      const UpdateStats stats = algo_.update(batch);
      if (sharer_.b_step() % cfg_.upload_period == 0) sharer_.publish(algo_.policy_params());
      inject_latency(cfg_.artificial_latency);
      // 4. report the optimization period (steps 1-3)
      sharer_.tfm().report_optimization(seconds_since(t0));
      {
        std::lock_guard lock(stats_mu_);
        last_ = stats;
      }
      // 5. sleep if the Learner is ahead
      if (const auto xi = sharer_.xi()) {
        const auto d = sleep_for_xi(*xi, sharer_.tfm_config());
        if (d.learner_s > 0.0) {
          sleeps_.fetch_add(1, std::memory_order_relaxed);
          sharer_.compensated_sleep(d.learner_s, pause);
        }
      }
      // 6.
      sharer_.add_b_step();
      updates_.fetch_add(1, std::memory_order_relaxed);
    }
  } catch (...) {
    sharer_.request_stop();
    throw;
  }
}

void run_concurrently(Sharer& sharer, Actor& actor, Learner& learner, const std::function<void()>& monitor,
                      std::chrono::milliseconds poll) {
  std::exception_ptr actor_error, learner_error;
  std::atomic<int> running{2};
  std::thread actor_thread([&] {
    try {
      actor.run();
    } catch (...) {
      actor_error = std::current_exception();
      sharer.request_stop();
    }
    running.fetch_sub(1);
  });
  std::thread learner_thread([&] {
    try {
      learner.run();
    } catch (...) {
      learner_error = std::current_exception();
      sharer.request_stop();
    }
    running.fetch_sub(1);
  });
  std::exception_ptr monitor_error;
  while (running.load() > 0) {
    if (monitor && !monitor_error) {
      try {
        monitor();
      } catch (...) {
        monitor_error = std::current_exception();
        sharer.request_stop();
      }
    }
    std::this_thread::sleep_for(poll);
  }
  actor_thread.join();
  learner_thread.join();
  if (learner_error) std::rethrow_exception(learner_error);
  if (actor_error) std::rethrow_exception(actor_error);
  if (monitor_error) std::rethrow_exception(monitor_error);
  if (monitor) monitor();
}

}  // namespace color::asl

#include "color/cli/mapgen.hpp"
#include "color/errors.hpp"
#include "color/vec_env.hpp"
#include "doctest.h"

using namespace color;
using namespace color::sim;

namespace {

std::vector<GridMap> test_maps(int n) {
  cli::MapGenOptions opts;
  opts.size_cm = 200;
  opts.density = 0.05;
  opts.seed = 3;
  opts.spawn_size_cm = 30;
  std::vector<GridMap> maps;
  for (int i = 0; i < n; ++i) maps.push_back(cli::generate_map(opts, static_cast<std::uint64_t>(i)));
  return maps;
}

EnvConfig short_episodes() {
  EnvConfig c;
  c.timeout_steps = 40;
  return c;
}

}  // namespace

TEST_CASE("N=1 reset equals a single environment reset") {
  const auto maps = test_maps(1);
  const auto ranges = DiversityRanges::around(SimParams{}, 0.3, 1);
  VecEnv venv(1, maps, EnvConfig{}, {ranges});
  SparrowEnv env(maps[0], EnvConfig{}, ranges);
  Rng rng(derive_seed(42, 0));
  CHECK(venv.reset_all(42)[0] == env.reset(rng));
}

TEST_CASE("reset is deterministic and rows follow their own maps") {
  const auto maps = test_maps(4);
  const auto ranges = DiversityRanges::around(SimParams{}, 0.3, 1);
  VecEnv a(16, maps, EnvConfig{}, {ranges});
  VecEnv b(16, maps, EnvConfig{}, {ranges});
  const auto sa = a.reset_all(9);
  CHECK(sa == b.reset_all(9));
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(a.map_index(i) == i % 4);
    SparrowEnv env(maps[i % 4], EnvConfig{}, ranges);
    Rng rng(derive_seed(9, i));
    CHECK(sa[i] == env.reset(rng));
  }
}

TEST_CASE("lockstep stepping matches independent environments, including auto-reset") {
  const auto maps = test_maps(3);
  const auto ranges = DiversityRanges::around(SimParams{}, 0.3, 1);
  const std::size_t n = 6;
  for (unsigned workers : {1u, 3u}) {
    VecEnv venv(n, maps, short_episodes(), {ranges}, workers);
    std::vector<SparrowEnv> envs;
    std::vector<Rng> rngs;
    for (std::size_t i = 0; i < n; ++i) {
      envs.emplace_back(maps[i % 3], short_episodes(), ranges);
      rngs.emplace_back(derive_seed(5, i));
    }
    auto rows = venv.reset_all(5);
    for (std::size_t i = 0; i < n; ++i) CHECK(rows[i] == envs[i].reset(rngs[i]));

    Rng pick(1);
    int terminals = 0;
    for (int t = 0; t < 200; ++t) {
      std::vector<int> actions(n);
      for (auto& a : actions) a = static_cast<int>(pick() % kNumActions);
      const auto step = venv.step_batch(actions);
      for (std::size_t i = 0; i < n; ++i) {
        const auto ref = envs[i].step(actions[i], rngs[i]);
        CHECK(step.terminal_states[i] == ref.state);
        CHECK(step.rewards[i] == static_cast<float>(ref.reward));
        CHECK(static_cast<bool>(step.dones[i]) == ref.done);
        CHECK(static_cast<bool>(step.truncated[i]) == ref.truncated);
        if (ref.done || ref.truncated) {
          ++terminals;
          CHECK(step.next_states[i] == envs[i].reset(rngs[i]));
          CHECK_FALSE(venv.env(i).terminal());
        } else {
          CHECK(step.next_states[i] == ref.state);
        }
      }
    }
    CHECK(terminals > 0);
  }
}

TEST_CASE("step_batch validates its input") {
  const auto maps = test_maps(1);
  VecEnv venv(4, maps, EnvConfig{}, {DiversityRanges{}});
  venv.reset_all(0);
  const std::vector<int> short_list{0, 1};
  CHECK_THROWS_AS(venv.step_batch(short_list), UsageError);
  const std::vector<int> bad{0, 1, 2, 7};
  CHECK_THROWS_AS(venv.step_batch(bad), UsageError);
}

TEST_CASE("arrival statistics") {
  CopyStats empty;
  CHECK_FALSE(empty.arrival_rate().has_value());
  CopyStats s{10, 8, 0.0};
  CHECK(*s.arrival_rate() == doctest::Approx(0.8));

  const auto maps = test_maps(2);
  VecEnv venv(8, maps, short_episodes(), {DiversityRanges{}});
  venv.reset_all(1);
  std::uint64_t callbacks = 0, arrived_cb = 0;
  venv.set_episode_callback([&](std::size_t, double, bool arrived) {
    ++callbacks;
    arrived_cb += arrived;
  });
  Rng pick(2);
  for (int t = 0; t < 300; ++t) {
    std::vector<int> actions(8);
    for (auto& a : actions) a = static_cast<int>(pick() % kNumActions);
    venv.step_batch(actions);
  }
  const auto report = venv.snapshot_stats();
  std::uint64_t eps = 0, arr = 0;
  for (const auto& c : report.per_copy) {
    eps += c.episodes;
    arr += c.arrivals;
  }
  CHECK(report.pooled.episodes == eps);
  CHECK(report.pooled.arrivals == arr);
  CHECK(callbacks == eps);
  CHECK(arrived_cb == arr);
  CHECK(eps > 0);
  venv.reset_stats();
  CHECK(venv.snapshot_stats().pooled.episodes == 0);
}

TEST_CASE("simulated time accumulates per copy") {
  const auto maps = test_maps(1);
  VecEnv venv(3, maps, EnvConfig{}, {DiversityRanges{}});
  venv.reset_all(0);
  const std::vector<int> actions{0, 0, 0};
  for (int t = 0; t < 10; ++t) venv.step_batch(actions);
  CHECK(venv.simulated_seconds() == doctest::Approx(3 * 10 * 0.1));
}

#include <cmath>
#include <sstream>

#include "color/errors.hpp"
#include "color/sim/kinematics.hpp"
#include "color/sim/lidar.hpp"
#include "color/sim/sparrow_env.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace color;
using namespace color::sim;

namespace {

// 1000 x 1000 cm open field: every beam from the centre stays short of the walls.
GridMap open_field() {
  GridMap m(1000, 1000, 1);
  m.set_goal({500, 500}, 20);
  m.set_spawn_region({480, 480, 520, 520});
  return m;
}

GridMap random_map(Rng& rng, int size = 200, int cell = 2, int blocks = 12) {
  GridMap m(size, size, cell);
  std::uniform_real_distribution<double> pos(0, size), ext(4, 30);
  for (int i = 0; i < blocks; ++i) {
    const double x = pos(rng), y = pos(rng);
    m.fill_rect({x, y, x + ext(rng), y + ext(rng)}, true);
  }
  return m;
}

EnvConfig quiet_config() {
  EnvConfig c;
  return c;
}

SimParams params_with(double k, double dt, int delay) {
  SimParams p;
  p.k = k;
  p.control_interval_s = dt;
  p.control_delay_steps = delay;
  p.lidar_noise_std_cm = 0.0;
  return p;
}

}  // namespace

TEST_CASE("kinematics examples") {
  const VelocityLimits lim{18, 1};
  auto v = apply_kinematics({0, 0}, {18, 1}, 0.0, lim);
  CHECK(v.linear == doctest::Approx(18));
  CHECK(v.angular == doctest::Approx(1));

  v = apply_kinematics({10, 0.5}, {10, 0.5}, 0.7, lim);
  CHECK(v.linear == doctest::Approx(10));
  CHECK(v.angular == doctest::Approx(0.5));

  v = apply_kinematics({0, 0}, {18, 1}, 0.5, lim);
  CHECK(v.linear == doctest::Approx(9));
  CHECK(v.angular == doctest::Approx(0.5));
}

TEST_CASE("kinematics clamps to the limits") {
  const auto v = apply_kinematics({30, -3}, {30, -3}, 0.2, {18, 1});
  CHECK(v.linear == 18);
  CHECK(v.angular == -1);
}

TEST_CASE("wrap_angle lands in (-pi, pi]") {
  CHECK(wrap_angle(M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(-M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(3 * M_PI / 2) == doctest::Approx(-M_PI / 2));
  CHECK(wrap_angle(0.25) == doctest::Approx(0.25));
}

TEST_CASE("unicycle integration matches fine Euler stepping") {
  Rng rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const Pose p0{u(rng) * 50, u(rng) * 50, u(rng) * M_PI};
    const Velocity v{18 * u(rng), trial % 5 == 0 ? 0.0 : u(rng)};
    const double dt = 0.1 + 0.5 * (u(rng) + 1);
    const auto exact = integrate_unicycle(p0, v, dt);
    Pose e = p0;
    const int n = 200000;
    const double h = dt / n;
    for (int i = 0; i < n; ++i) {
      const double mid = e.heading + 0.5 * v.angular * h;
      e.x += v.linear * std::cos(mid) * h;
      e.y += v.linear * std::sin(mid) * h;
      e.heading += v.angular * h;
    }
    CHECK(exact.x == doctest::Approx(e.x).epsilon(1e-6));
    CHECK(exact.y == doctest::Approx(e.y).epsilon(1e-6));
    CHECK(std::abs(wrap_angle(exact.heading - e.heading)) < 1e-9);
  }
}

TEST_CASE("lidar on an open field reads max range") {
  const auto map = open_field();
  const LidarConfig cfg;
  Rng rng(1);
  std::uniform_real_distribution<double> h(-M_PI, M_PI);
  for (int i = 0; i < 10; ++i) {
    const auto scan = lidar_scan(map, {500, 500, h(rng)}, cfg);
    for (double d : scan) CHECK(d == cfg.max_range_cm);
  }
}

TEST_CASE("lidar beam meets a perpendicular wall at 100 cm") {
  auto map = open_field();
  map.fill_rect({600, 300, 610, 700}, true);
  const LidarConfig cfg;
  const auto scan = lidar_scan(map, {500, 500, 0}, cfg);
  CHECK(cfg.beam_offset(13) == doctest::Approx(0.0));
  const double oracle = oracle::ray_march(map, {500, 500}, 0.0, cfg.max_range_cm, 0.1);
  CHECK(std::abs(scan[13] - 100.0) <= std::sqrt(2.0));
  CHECK(std::abs(scan[13] - oracle) <= std::sqrt(2.0));
}

TEST_CASE("noise-free scans are repeatable and match the ray-marching oracle") {
  Rng rng(11);
  const LidarConfig cfg;
  for (int trial = 0; trial < 20; ++trial) {
    const auto map = random_map(rng);
    std::uniform_real_distribution<double> pos(10, 190), h(-M_PI, M_PI);
    const Pose pose{pos(rng), pos(rng), h(rng)};
    const auto a = lidar_scan(map, pose, cfg);
    const auto b = lidar_scan(map, pose, cfg);
    CHECK(a == b);
    const double tol = map.cell_size_cm() * std::sqrt(2.0);
    for (int k = 0; k < kLidarBeams; ++k) {
      const double ref =
          oracle::ray_march(map, {pose.x, pose.y}, pose.heading + cfg.beam_offset(k), cfg.max_range_cm,
                            0.1 * map.cell_size_cm());
      CHECK(std::abs(a[static_cast<std::size_t>(k)] - ref) <= tol);
    }
  }
}

TEST_CASE("noisy scans stay inside [0, max_range]") {
  auto map = open_field();
  map.fill_rect({502, 400, 503, 600}, true);
  const LidarConfig cfg;
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    for (double d : lidar_scan(map, {500, 500, 0}, cfg, 5.0, rng)) {
      CHECK(d >= 0.0);
      CHECK(d <= cfg.max_range_cm);
    }
  }
}

TEST_CASE("collision examples") {
  GridMap free_map(100, 100, 1);
  CHECK_FALSE(check_collision(free_map, {50, 50}, 9));

  GridMap m(100, 100, 1);
  m.set_occupied(50, 50, true);
  CHECK(check_collision(m, {50.5, 50.5}, 9));

  GridMap wall(100, 100, 1);
  wall.fill_rect({60, 10, 62, 90}, true);
  // robot edge 1 cm short of the wall face at x = 60 -> centre at 60 - 9 + 1
  CHECK(check_collision(wall, {52, 50}, 9));
  CHECK(oracle::disc_hits_cells(wall, {52, 50}, 9));
  CHECK_FALSE(check_collision(wall, {50, 50}, 9));
}

TEST_CASE("collision agrees with the exhaustive disc-cell oracle") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto map = random_map(rng, 120, 2, 8);
    std::uniform_real_distribution<double> pos(0, 120);
    for (int i = 0; i < 100; ++i) {
      const Vec2 c{pos(rng), pos(rng)};
      CHECK(check_collision(map, c, 9) == oracle::disc_hits_cells(map, c, 9));
    }
  }
}

TEST_CASE("reward examples") {
  const RelativeGeometry g{0.0, 0.0, 0.0};
  CHECK(compute_reward(g, 500, 18, 18, 200, Event::collision) == -10);
  CHECK(compute_reward(g, 500, 18, 18, 200, Event::arrival) == 75);
  CHECK(compute_reward(g, 500, 18, 18, 200, Event::none) == doctest::Approx(1.0));
  // near an obstacle and slow
  CHECK(compute_reward(g, 500, 5, 18, 10, Event::none) == doctest::Approx(0.3 + 0.1 + 0.3 - 0.1));
  // facing away from the goal at the planning horizon
  const RelativeGeometry far{500.0, 500.0, M_PI};
  CHECK(compute_reward(far, 500, 0, 18, 200, Event::none) == doctest::Approx(-0.3));
}

TEST_CASE("relative geometry") {
  const auto g = relative_geometry({0, 0}, {100, 0}, {50, 10, M_PI / 2});
  CHECK(g.d1 == doctest::Approx(std::hypot(50, 10)));
  CHECK(g.d2 == doctest::Approx(10));
  CHECK(g.alpha == doctest::Approx(wrap_angle(std::atan2(-10, 50) - M_PI / 2)));
}

TEST_CASE("action table at nominal limits") {
  const EnvConfig cfg;
  const SimParams p;
  const Velocity expected[] = {{0.36, 1}, {18, 1}, {18, 0}, {18, -1}, {0.36, -1}};
  for (int a = 0; a < kNumActions; ++a) {
    const auto v = action_target(a, cfg, p);
    CHECK(v.linear == doctest::Approx(expected[a].linear));
    CHECK(v.angular == doctest::Approx(expected[a].angular));
  }
  CHECK_THROWS_AS(action_target(5, cfg, p), UsageError);
  CHECK_THROWS_AS(action_target(-1, cfg, p), UsageError);
}

TEST_CASE("encode_state at the goal on an open field") {
  SparrowEnv env(open_field(), quiet_config(), DiversityRanges::fixed(params_with(0.6, 0.1, 1)));
  env.place({500, 500, 0.3}, {300, 300}, params_with(0.6, 0.1, 1));
  const auto s = env.encode_state();
  CHECK(s[0] == 0.0f);
  CHECK(s[1] == 0.0f);
  CHECK(s[2] == 0.0f);
  CHECK(s[3] == 0.0f);
  CHECK(s[4] == 0.0f);
  for (int k = 0; k < kLidarBeams; ++k) CHECK(s[static_cast<std::size_t>(5 + k)] == 1.0f);
}

TEST_CASE("dx_norm reaches 1 at distance D along the relative x axis") {
  EnvConfig cfg;
  cfg.planning_distance_cm = 200;
  SparrowEnv env(open_field(), cfg, DiversityRanges::fixed(params_with(0.6, 0.1, 1)));
  const Vec2 start{380, 420};
  const double f = std::atan2(500 - start.y, 500 - start.x) - M_PI / 4;
  env.place({500 - 200 * std::cos(f), 500 - 200 * std::sin(f), 0}, start, params_with(0.6, 0.1, 1));
  const auto s = env.encode_state();
  CHECK(s[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(s[1] == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("encode_state equals recomputation from raw fields") {
  Rng rng(8);
  auto map = open_field();
  map.fill_rect({560, 380, 600, 640}, true);
  SimParams nominal;
  SparrowEnv env(map, EnvConfig{}, DiversityRanges::around(nominal, 0.3, 1));
  for (int ep = 0; ep < 20; ++ep) {
    env.reset(rng);
    for (int t = 0; t < 15 && !env.terminal(); ++t) {
      const auto out = env.step(static_cast<int>(rng() % kNumActions), rng);
      const auto& r = env.robot();
      const auto& p = env.params();
      const Vec2 g = env.map().goal_center();
      const Vec2 st = env.start();
      const double f = std::atan2(g.y - st.y, g.x - st.x) - M_PI / 4;
      const double D = env.planning_distance();
      const double rx = g.x - r.pose.x, ry = g.y - r.pose.y;
      CHECK(out.state[0] == doctest::Approx((rx * std::cos(f) + ry * std::sin(f)) / D).epsilon(1e-5));
      CHECK(out.state[1] == doctest::Approx((-rx * std::sin(f) + ry * std::cos(f)) / D).epsilon(1e-5));
      CHECK(out.state[2] == doctest::Approx(wrap_angle(std::atan2(ry, rx) - r.pose.heading) / M_PI).epsilon(1e-5));
      CHECK(out.state[3] == doctest::Approx(r.velocity.linear / p.v_linear_max_cm_s).epsilon(1e-5));
      CHECK(out.state[4] == doctest::Approx(r.velocity.angular / p.v_angular_max_rad_s).epsilon(1e-5));
      for (int k = 0; k < kLidarBeams; ++k) {
        const auto i = static_cast<std::size_t>(k);
        CHECK(out.state[5 + i] == doctest::Approx(env.last_scan()[i] / 300.0).epsilon(1e-5));
      }
      for (float v : out.state) {
        CHECK(v >= -1.0f);
        CHECK(v <= 1.0f);
      }
    }
  }
}

TEST_CASE("straight action with K=0 over one second advances 18 cm") {
  const auto p = params_with(0.0, 1.0, 0);
  SparrowEnv env(open_field(), EnvConfig{}, DiversityRanges::fixed(p));
  Rng rng(1);
  env.place({300, 300, 0}, {300, 300}, p);
  const auto out = env.step(2, rng);
  CHECK(env.robot().pose.x == doctest::Approx(318));
  CHECK(env.robot().pose.y == doctest::Approx(300));
  CHECK(env.robot().pose.heading == doctest::Approx(0));
  CHECK(out.event == Event::none);
}

TEST_CASE("reaching the goal ends the episode with +75") {
  const auto p = params_with(0.0, 0.1, 0);
  SparrowEnv env(open_field(), EnvConfig{}, DiversityRanges::fixed(p));
  Rng rng(1);
  env.place({500 - 21, 500, 0}, {300, 300}, p);
  const auto out = env.step(2, rng);
  CHECK(out.event == Event::arrival);
  CHECK(out.reward == 75);
  CHECK(out.done);
  CHECK_FALSE(out.truncated);
  CHECK_THROWS_AS(env.step(2, rng), UsageError);
}

TEST_CASE("driving into a wall is a collision with -10") {
  const auto p = params_with(0.0, 1.0, 0);
  auto map = open_field();
  map.fill_rect({320, 200, 330, 400}, true);
  SparrowEnv env(map, EnvConfig{}, DiversityRanges::fixed(p));
  Rng rng(1);
  env.place({300, 300, 0}, {300, 300}, p);
  const auto out = env.step(2, rng);
  CHECK(out.event == Event::collision);
  CHECK(out.reward == -10);
  CHECK(out.done);
}

TEST_CASE("timeout truncates without done") {
  const auto p = params_with(0.6, 0.1, 1);
  EnvConfig cfg;
  cfg.timeout_steps = 5;
  SparrowEnv env(open_field(), cfg, DiversityRanges::fixed(p));
  Rng rng(1);
  env.place({300, 300, 0}, {300, 300}, p);
  for (int t = 1; t < 5; ++t) CHECK(env.step(0, rng).event == Event::none);
  const auto out = env.step(0, rng);
  CHECK(out.event == Event::timeout);
  CHECK(out.truncated);
  CHECK_FALSE(out.done);
}

TEST_CASE("control delay postpones the response by d steps") {
  for (int d = 0; d <= 3; ++d) {
    const auto p = params_with(0.0, 0.1, d);
    SparrowEnv env(open_field(), EnvConfig{}, DiversityRanges::fixed(p));
    Rng rng(1);
    env.place({300, 300, 0}, {300, 300}, p);
    // first command is a left arc, later ones go straight
    for (int t = 0; t < d; ++t) {
      env.step(t == 0 ? 1 : 2, rng);
      CHECK(env.robot().velocity.linear == 0.0);
      CHECK(env.robot().velocity.angular == 0.0);
    }
    env.step(d == 0 ? 1 : 2, rng);
    CHECK(env.robot().velocity.linear == doctest::Approx(18));
    CHECK(env.robot().velocity.angular == doctest::Approx(1.0));
  }
}

TEST_CASE("step before reset is a usage error") {
  SparrowEnv env(open_field(), EnvConfig{}, DiversityRanges{});
  Rng rng(1);
  CHECK_THROWS_AS(env.step(0, rng), UsageError);
}

TEST_CASE("zero-width ranges reproduce nominal parameters") {
  SimParams nominal;
  nominal.k = 0.42;
  nominal.control_delay_steps = 2;
  SparrowEnv env(open_field(), EnvConfig{}, DiversityRanges::fixed(nominal));
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    env.reset(rng);
    CHECK(env.params() == nominal);
  }
}

TEST_CASE("10^4 resets keep every parameter inside its interval") {
  const auto ranges = DiversityRanges::around(SimParams{}, 0.3, 1);
  SparrowEnv env(open_field(), EnvConfig{}, ranges);
  Rng rng(9);
  double k_lo = 1e9, k_hi = -1e9;
  int d_lo = 99, d_hi = -1;
  for (int i = 0; i < 10000; ++i) {
    env.reset(rng);
    const auto& p = env.params();
    CHECK(ranges.k.contains(p.k));
    CHECK(ranges.control_interval_s.contains(p.control_interval_s));
    CHECK(ranges.control_delay_steps.contains(p.control_delay_steps));
    CHECK(ranges.v_linear_max_cm_s.contains(p.v_linear_max_cm_s));
    CHECK(ranges.v_angular_max_rad_s.contains(p.v_angular_max_rad_s));
    CHECK(ranges.lidar_noise_std_cm.contains(p.lidar_noise_std_cm));
    k_lo = std::min(k_lo, p.k);
    k_hi = std::max(k_hi, p.k);
    d_lo = std::min(d_lo, p.control_delay_steps);
    d_hi = std::max(d_hi, p.control_delay_steps);
  }
  // the draws actually cover the interval
  CHECK(k_lo < ranges.k.lo + 0.01);
  CHECK(k_hi > ranges.k.hi - 0.01);
  CHECK(d_lo == ranges.control_delay_steps.lo);
  CHECK(d_hi == ranges.control_delay_steps.hi);
}

TEST_CASE("reset after a terminal episode starts fresh") {
  const auto p = params_with(0.0, 0.1, 0);
  SparrowEnv env(open_field(), EnvConfig{}, DiversityRanges::fixed(p));
  Rng rng(1);
  env.place({500 - 21, 500, 0}, {300, 300}, p);
  CHECK(env.step(2, rng).done);
  env.reset(rng);
  CHECK_FALSE(env.terminal());
  CHECK(env.steps() == 0);
  CHECK(env.robot().velocity == Velocity{});
  CHECK(env.map().spawn_region().contains(env.start()));
  CHECK_FALSE(check_collision(env.map(), env.start(), env.robot().radius_cm));
  CHECK_NOTHROW(env.step(2, rng));
}

TEST_CASE("same seed and actions give identical trajectories") {
  const auto ranges = DiversityRanges::around(SimParams{}, 0.3, 1);
  auto map = open_field();
  map.fill_rect({540, 300, 560, 560}, true);
  SparrowEnv a(map, EnvConfig{}, ranges), b(map, EnvConfig{}, ranges);
  Rng ra(77), rb(77), actions(5);
  CHECK(a.reset(ra) == b.reset(rb));
  for (int t = 0; t < 300; ++t) {
    const int act = static_cast<int>(actions() % kNumActions);
    const auto oa = a.step(act, ra);
    const auto ob = b.step(act, rb);
    CHECK(oa.state == ob.state);
    CHECK(oa.reward == ob.reward);
    if (oa.done || oa.truncated) {
      CHECK(a.reset(ra) == b.reset(rb));
    }
  }
}

TEST_CASE("random obstacles keep the map connected and spare spawn and goal") {
  EnvConfig cfg;
  cfg.random_obstacles.count = 8;
  GridMap base(366, 366, 1);
  base.set_goal({300, 300}, 20);
  base.set_spawn_region({20, 20, 80, 80});
  SparrowEnv env(base, cfg, DiversityRanges{});
  Rng rng(2);
  bool changed = false;
  for (int ep = 0; ep < 10; ++ep) {
    env.reset(rng);
    CHECK(env.map().connected(cfg.robot_radius_cm));
    CHECK_FALSE(env.map().occupied_at(env.map().goal_center()));
    changed = changed || env.map().occupied_count() > base.occupied_count();
  }
  CHECK(changed);
}

TEST_CASE("map text round trip") {
  GridMap m(40, 30, 2);
  m.fill_rect({10, 10, 16, 20}, true);
  m.set_goal({30, 22}, 3);
  m.set_spawn_region({4, 4, 8, 8});
  std::stringstream ss;
  write_map(ss, m);
  const auto text = ss.str();
  const auto parsed = parse_map(ss);
  CHECK(parsed.cols() == 20);
  CHECK(parsed.rows() == 15);
  CHECK(parsed.occupancy() == m.occupancy());
  std::stringstream again;
  write_map(again, parsed);
  CHECK(again.str() == text);
}

TEST_CASE("malformed maps are rejected") {
  std::istringstream bad_header("abc\n");
  CHECK_THROWS_AS(parse_map(bad_header), MapError);
  std::istringstream short_rows("4 4 1\n####\n#G.#\n");
  CHECK_THROWS_AS(parse_map(short_rows), MapError);
  std::istringstream no_goal("4 4 1\n####\n#S.#\n#..#\n####\n");
  CHECK_THROWS_AS(parse_map(no_goal), MapError);
}

TEST_CASE("connectivity detects a sealed goal") {
  GridMap m(200, 200, 1);
  m.set_goal({170, 170}, 10);
  m.set_spawn_region({10, 10, 40, 40});
  CHECK(m.connected(9));
  m.fill_rect({100, 0, 104, 200}, true);
  CHECK_FALSE(m.connected(9));
}

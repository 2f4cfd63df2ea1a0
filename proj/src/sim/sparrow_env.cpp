#include "color/sim/sparrow_env.hpp"

#include <algorithm>
#include <cmath>

#include "color/errors.hpp"

namespace color::sim {

namespace {

constexpr double kCollisionReward = -10.0;
constexpr double kArrivalReward = 75.0;

double uniform(Rng& rng, Interval<double> iv) {
  if (iv.lo == iv.hi) return iv.lo;
  return std::uniform_real_distribution<double>(iv.lo, iv.hi)(rng);
}

template <typename T>
void require_ordered(const Interval<T>& iv, const char* name) {
  if (!(iv.lo <= iv.hi)) throw ConfigError(std::string("diversity range for ") + name + " is inverted");
}

}  // namespace

std::string_view to_string(Event e) {
  switch (e) {
    case Event::none:
      return "none";
    case Event::collision:
      return "collision";
    case Event::arrival:
      return "arrival";
    case Event::timeout:
      return "timeout";
  }
  return "?";
}

DiversityRanges DiversityRanges::fixed(const SimParams& n) {
  return {{n.k, n.k},
          {n.control_interval_s, n.control_interval_s},
          {n.control_delay_steps, n.control_delay_steps},
          {n.v_linear_max_cm_s, n.v_linear_max_cm_s},
          {n.v_angular_max_rad_s, n.v_angular_max_rad_s},
          {n.lidar_noise_std_cm, n.lidar_noise_std_cm}};
}

DiversityRanges DiversityRanges::around(const SimParams& n, double fraction, int delay_spread) {
  auto span = [fraction](double v) { return Interval<double>{v * (1.0 - fraction), v * (1.0 + fraction)}; };
  DiversityRanges r;
  r.k = span(n.k);
  r.k.hi = std::min(r.k.hi, 0.99);
  r.control_interval_s = span(n.control_interval_s);
  r.control_delay_steps = {std::max(0, n.control_delay_steps - delay_spread), n.control_delay_steps + delay_spread};
  r.v_linear_max_cm_s = span(n.v_linear_max_cm_s);
  r.v_angular_max_rad_s = span(n.v_angular_max_rad_s);
  r.lidar_noise_std_cm = span(n.lidar_noise_std_cm);
  return r;
}

SimParams DiversityRanges::sample(Rng& rng) const {
  SimParams p;
  p.k = uniform(rng, k);
  p.control_interval_s = uniform(rng, control_interval_s);
  p.control_delay_steps =
      control_delay_steps.lo == control_delay_steps.hi
          ? control_delay_steps.lo
          : std::uniform_int_distribution<int>(control_delay_steps.lo, control_delay_steps.hi)(rng);
  p.v_linear_max_cm_s = uniform(rng, v_linear_max_cm_s);
  p.v_angular_max_rad_s = uniform(rng, v_angular_max_rad_s);
  p.lidar_noise_std_cm = uniform(rng, lidar_noise_std_cm);
  return p;
}

void DiversityRanges::validate(int max_delay_steps) const {
  require_ordered(k, "K");
  require_ordered(control_interval_s, "control_interval_s");
  require_ordered(control_delay_steps, "control_delay_steps");
  require_ordered(v_linear_max_cm_s, "v_linear_max");
  require_ordered(v_angular_max_rad_s, "v_angular_max");
  require_ordered(lidar_noise_std_cm, "lidar_noise_std");
  if (!(k.lo >= 0.0 && k.hi < 1.0)) throw ConfigError("K must lie in [0, 1)");
  if (!(control_interval_s.lo > 0.0)) throw ConfigError("control interval must be positive");
  if (control_delay_steps.lo < 0 || control_delay_steps.hi > max_delay_steps) {
    throw ConfigError("control delay outside [0, " + std::to_string(max_delay_steps) + "]");
  }
  if (!(v_linear_max_cm_s.lo > 0.0 && v_angular_max_rad_s.lo > 0.0)) {
    throw ConfigError("velocity limits must be positive");
  }
  if (lidar_noise_std_cm.lo < 0.0) throw ConfigError("lidar noise must be non-negative");
}

RelativeGeometry relative_geometry(Vec2 start, Vec2 goal, const Pose& robot) {
  RelativeGeometry g;
  const double gx = goal.x - robot.x, gy = goal.y - robot.y;
  g.d1 = std::hypot(gx, gy);

  const double sx = goal.x - start.x, sy = goal.y - start.y;
  const double len2 = sx * sx + sy * sy;
  if (len2 <= 0.0) {
    g.d2 = g.d1;
  } else {
    const double t = std::clamp(((robot.x - start.x) * sx + (robot.y - start.y) * sy) / len2, 0.0, 1.0);
    g.d2 = std::hypot(robot.x - (start.x + t * sx), robot.y - (start.y + t * sy));
  }
  g.alpha = g.d1 > 0.0 ? wrap_angle(std::atan2(gy, gx) - robot.heading) : 0.0;
  return g;
}

double compute_reward(const RelativeGeometry& geom, double planning_distance, double v_linear,
                      double v_linear_max, double scan_min_cm, Event event, double near_obstacle_cm) {
  if (event == Event::collision) return kCollisionReward;
  if (event == Event::arrival) return kArrivalReward;
  const double r_d1 = std::clamp(1.0 - geom.d1 / planning_distance, 0.0, 1.0);
  const double r_d2 = std::clamp(1.0 - geom.d2 / planning_distance, 0.0, 1.0);
  const double r_v = v_linear > v_linear_max / 2.0 ? 1.0 : 0.0;
  const double r_alpha = std::clamp(1.0 - 2.0 * std::abs(geom.alpha) / M_PI, -1.0, 1.0);
  const double r_d = scan_min_cm < near_obstacle_cm ? -1.0 : 0.0;
  return 0.3 * r_d1 + 0.1 * r_d2 + 0.3 * r_v + 0.3 * r_alpha + 0.1 * r_d;
}

Velocity action_target(int action, const EnvConfig& cfg, const SimParams& p) {
  const double turn = cfg.turn_linear_cm_s / cfg.nominal_v_linear_max_cm_s;
  const double lin_scale = p.v_linear_max_cm_s;
  const double ang_scale = p.v_angular_max_rad_s;
  switch (action) {
    case 0:
      return {turn * lin_scale, ang_scale};
    case 1:
      return {lin_scale, ang_scale};
    case 2:
      return {lin_scale, 0.0};
    case 3:
      return {lin_scale, -ang_scale};
    case 4:
      return {turn * lin_scale, -ang_scale};
    default:
      throw UsageError("action index " + std::to_string(action) + " outside 0..4");
  }
}

SparrowEnv::SparrowEnv(GridMap map, EnvConfig cfg, DiversityRanges ranges)
    : base_map_(std::move(map)), cfg_(cfg), ranges_(ranges) {
  base_map_.validate();
  ranges_.validate(cfg_.max_delay_steps);
  if (!(cfg_.robot_radius_cm > 0.0)) throw ConfigError("robot radius must be positive");
  if (cfg_.timeout_steps <= 0) throw ConfigError("timeout must be positive");
  map_ = base_map_;
  planning_distance_ = cfg_.planning_distance_cm > 0.0 ? cfg_.planning_distance_cm : base_map_.diagonal_cm();
  robot_.radius_cm = cfg_.robot_radius_cm;
}

void SparrowEnv::set_ranges(const DiversityRanges& r) {
  r.validate(cfg_.max_delay_steps);
  ranges_ = r;
}

void SparrowEnv::randomize_obstacles(Rng& rng) {
  const auto& ro = cfg_.random_obstacles;
  const double margin = cfg_.robot_radius_cm * 2.0;
  const Rect& spawn = base_map_.spawn_region();
  const Vec2 goal = base_map_.goal_center();
  const double keep_out = base_map_.goal_radius_cm() + margin;
  std::uniform_real_distribution<double> size(ro.min_size_cm, ro.max_size_cm);
  std::uniform_real_distribution<double> ux(0.0, base_map_.width_cm());
  std::uniform_real_distribution<double> uy(0.0, base_map_.height_cm());

  constexpr int kLayoutAttempts = 20;
  for (int attempt = 0; attempt < kLayoutAttempts; ++attempt) {
    map_ = base_map_;
    int placed = 0;
    for (int tries = 0; placed < ro.count && tries < ro.count * 50; ++tries) {
      const double w = size(rng), h = size(rng);
      const double x = ux(rng), y = uy(rng);
      const Rect r{x, y, x + w, y + h};
      const Rect grown{r.x_min - margin, r.y_min - margin, r.x_max + margin, r.y_max + margin};
      const bool hits_spawn = grown.x_min < spawn.x_max && grown.x_max > spawn.x_min &&
                              grown.y_min < spawn.y_max && grown.y_max > spawn.y_min;
      const double nx = std::clamp(goal.x, r.x_min, r.x_max) - goal.x;
      const double ny = std::clamp(goal.y, r.y_min, r.y_max) - goal.y;
      if (hits_spawn || std::hypot(nx, ny) < keep_out) continue;
      map_.fill_rect(r, true);
      ++placed;
    }
    if (map_.connected(cfg_.robot_radius_cm)) return;
  }
  map_ = base_map_;
}

State SparrowEnv::reset(Rng& rng) {
  params_ = ranges_.sample(rng);
  if (cfg_.random_obstacles.count > 0) randomize_obstacles(rng);

  const Rect& spawn = map_.spawn_region();
  std::uniform_real_distribution<double> heading(-M_PI, M_PI);
  bool found = false;
  Pose pose{};
  for (int attempt = 0; attempt < cfg_.spawn_attempts; ++attempt) {
    pose.x = spawn.x_min == spawn.x_max ? spawn.x_min
                                        : std::uniform_real_distribution<double>(spawn.x_min, spawn.x_max)(rng);
    pose.y = spawn.y_min == spawn.y_max ? spawn.y_min
                                        : std::uniform_real_distribution<double>(spawn.y_min, spawn.y_max)(rng);
    pose.heading = wrap_angle(heading(rng));
    if (!check_collision(map_, {pose.x, pose.y}, cfg_.robot_radius_cm)) {
      found = true;
      break;
    }
  }
  if (!found) throw MapError("no collision-free spawn pose found in the spawn region");

  robot_.pose = pose;
  robot_.velocity = {};
  robot_.pending_actions.clear();
  applied_target_ = {};
  start_ = {pose.x, pose.y};
  const Vec2 goal = map_.goal_center();
  frame_angle_ = std::atan2(goal.y - start_.y, goal.x - start_.x) - M_PI / 4.0;
  steps_ = 0;
  terminal_ = false;
  started_ = true;
  scan_ = lidar_scan(map_, robot_.pose, cfg_.lidar, params_.lidar_noise_std_cm, rng);
  return encode_state();
}

void SparrowEnv::place(const Pose& pose, Vec2 start, const SimParams& params) {
  params_ = params;
  robot_.pose = pose;
  robot_.pose.heading = wrap_angle(pose.heading);
  robot_.velocity = {};
  robot_.pending_actions.clear();
  applied_target_ = {};
  start_ = start;
  const Vec2 goal = map_.goal_center();
  frame_angle_ = std::atan2(goal.y - start_.y, goal.x - start_.x) - M_PI / 4.0;
  steps_ = 0;
  terminal_ = false;
  started_ = true;
  scan_ = lidar_scan(map_, robot_.pose, cfg_.lidar);
}

StepOutcome SparrowEnv::step(int action, Rng& rng) {
  if (!started_) throw UsageError("step() called before reset()");
  if (terminal_) throw UsageError("step() called on a finished episode; call reset() first");
  robot_.pending_actions.push_back(action_target(action, cfg_, params_));
  if (static_cast<int>(robot_.pending_actions.size()) > params_.control_delay_steps) {
    applied_target_ = robot_.pending_actions.front();
    robot_.pending_actions.pop_front();
  }
  const VelocityLimits limits{params_.v_linear_max_cm_s, params_.v_angular_max_rad_s};
  robot_.velocity = apply_kinematics(robot_.velocity, applied_target_, params_.k, limits);
  robot_.pose = integrate_unicycle(robot_.pose, robot_.velocity, params_.control_interval_s);
  ++steps_;

  scan_ = lidar_scan(map_, robot_.pose, cfg_.lidar, params_.lidar_noise_std_cm, rng);
  const Vec2 goal = map_.goal_center();
  const auto geom = relative_geometry(start_, goal, robot_.pose);

  StepOutcome out;
  if (check_collision(map_, {robot_.pose.x, robot_.pose.y}, robot_.radius_cm)) {
    out.event = Event::collision;
  } else if (geom.d1 <= map_.goal_radius_cm()) {
    out.event = Event::arrival;
  } else if (steps_ >= cfg_.timeout_steps) {
    out.event = Event::timeout;
  }
  out.done = out.event == Event::collision || out.event == Event::arrival;
  out.truncated = out.event == Event::timeout;
  terminal_ = out.event != Event::none;

  const double scan_min = *std::min_element(scan_.begin(), scan_.end());
  out.reward = compute_reward(geom, planning_distance_, robot_.velocity.linear, params_.v_linear_max_cm_s,
                              scan_min, out.event, cfg_.near_obstacle_cm);
  out.state = encode_state();
  return out;
}

State SparrowEnv::encode_state() const {
  State s{};
  const Vec2 goal = map_.goal_center();
  const double rx = goal.x - robot_.pose.x, ry = goal.y - robot_.pose.y;
  const double c = std::cos(frame_angle_), sn = std::sin(frame_angle_);
  s[0] = static_cast<float>((c * rx + sn * ry) / planning_distance_);
  s[1] = static_cast<float>((-sn * rx + c * ry) / planning_distance_);
  const double alpha = (rx == 0.0 && ry == 0.0) ? 0.0 : wrap_angle(std::atan2(ry, rx) - robot_.pose.heading);
  s[2] = static_cast<float>(alpha / M_PI);
  s[3] = static_cast<float>(robot_.velocity.linear / params_.v_linear_max_cm_s);
  s[4] = static_cast<float>(robot_.velocity.angular / params_.v_angular_max_rad_s);
  for (int k = 0; k < kLidarBeams; ++k) {
    s[static_cast<std::size_t>(5 + k)] = static_cast<float>(scan_[static_cast<std::size_t>(k)] / cfg_.lidar.max_range_cm);
  }
  return s;
}

}  // namespace color::sim

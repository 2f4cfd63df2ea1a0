#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string_view>

#include "color/rng.hpp"
#include "color/sim/grid_map.hpp"
#include "color/sim/kinematics.hpp"
#include "color/sim/lidar.hpp"

namespace color::sim {

inline constexpr int kStateDim = 5 + kLidarBeams;  // 32
inline constexpr int kNumActions = 5;
using State = std::array<float, kStateDim>;

/// Physical parameters of one episode.
struct SimParams {
  double k = 0.6;
  double control_interval_s = 0.1;
  int control_delay_steps = 1;
  double v_linear_max_cm_s = 18.0;
  double v_angular_max_rad_s = 1.0;
  double lidar_noise_std_cm = 1.0;

  friend bool operator==(const SimParams&, const SimParams&) = default;
};

template <typename T>
struct Interval {
  T lo{};
  T hi{};
  bool contains(T v) const { return v >= lo && v <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Uniform sampling intervals for SimParams, resampled at every reset.
struct DiversityRanges {
  Interval<double> k{0.6, 0.6};
  Interval<double> control_interval_s{0.1, 0.1};
  Interval<int> control_delay_steps{1, 1};
  Interval<double> v_linear_max_cm_s{18.0, 18.0};
  Interval<double> v_angular_max_rad_s{1.0, 1.0};
  Interval<double> lidar_noise_std_cm{1.0, 1.0};

  /// Zero-width ranges pinned to `nominal`.
  static DiversityRanges fixed(const SimParams& nominal);
  /// nominal*(1 -/+ fraction) per real parameter, nominal -/+ delay_spread for the delay.
  static DiversityRanges around(const SimParams& nominal, double fraction, int delay_spread);

  SimParams sample(Rng& rng) const;
  /// Throws ConfigError unless every interval is ordered and physically valid.
  void validate(int max_delay_steps) const;

  friend bool operator==(const DiversityRanges&, const DiversityRanges&) = default;
};

/// Per-episode rectangular obstacles added on top of the base map.
struct RandomObstacles {
  int count = 0;
  double min_size_cm = 20.0;
  double max_size_cm = 60.0;
};

struct EnvConfig {
  double robot_radius_cm = 9.0;
  LidarConfig lidar{};
  int timeout_steps = 1000;
  /// Linear speed of the two turn-in-place actions at nominal v_linear_max.
  double turn_linear_cm_s = 0.36;
  /// Speed limit the action table is expressed against.
  double nominal_v_linear_max_cm_s = 18.0;
  double nominal_v_angular_max_rad_s = 1.0;
  /// Maximum local planning distance D; <= 0 selects the map diagonal.
  double planning_distance_cm = 0.0;
  int max_delay_steps = 16;
  int spawn_attempts = 1000;
  double near_obstacle_cm = 30.0;
  RandomObstacles random_obstacles{};
};

enum class Event : std::uint8_t { none, collision, arrival, timeout };
std::string_view to_string(Event e);

struct StepOutcome {
  State state{};
  double reward = 0.0;
  bool done = false;       // collision or arrival
  bool truncated = false;  // timeout
  Event event = Event::none;
};

struct RobotState {
  Pose pose{};
  Velocity velocity{};
  double radius_cm = 9.0;
  std::deque<Velocity> pending_actions;
};

/// Geometry relative to the current start->goal task.
struct RelativeGeometry {
  double d1 = 0.0;     // robot to goal centre
  double d2 = 0.0;     // robot to the start->goal segment
  double alpha = 0.0;  // signed heading error to the goal bearing, (-pi, pi]
};

RelativeGeometry relative_geometry(Vec2 start, Vec2 goal, const Pose& robot);

/// Shaped step reward; terminal events override it with -10 / +75.
double compute_reward(const RelativeGeometry& geom, double planning_distance, double v_linear,
                      double v_linear_max, double scan_min_cm, Event event,
                      double near_obstacle_cm = 30.0);

/// Target velocity for `action` (0 turn left .. 4 turn right) under `params`.
Velocity action_target(int action, const EnvConfig& cfg, const SimParams& params);

/// One Sparrow environment copy: a robot driving on a grid map toward a goal.
class SparrowEnv {
 public:
  SparrowEnv(GridMap map, EnvConfig cfg, DiversityRanges ranges);

  /// Starts an episode: resamples parameters and the start pose.
  State reset(Rng& rng);
  StepOutcome step(int action, Rng& rng);

  State encode_state() const;

  const GridMap& base_map() const { return base_map_; }
  /// Map in use this episode (base map plus any random obstacles).
  const GridMap& map() const { return map_; }
  const EnvConfig& config() const { return cfg_; }
  const DiversityRanges& ranges() const { return ranges_; }
  void set_ranges(const DiversityRanges& r);
  const SimParams& params() const { return params_; }
  const RobotState& robot() const { return robot_; }
  const LidarScan& last_scan() const { return scan_; }
  Vec2 start() const { return start_; }
  double planning_distance() const { return planning_distance_; }
  int steps() const { return steps_; }
  bool terminal() const { return terminal_; }
  bool started() const { return started_; }

  /// Places the robot directly (tests and tooling). Velocities and the delay
  /// queue are reset; the current episode parameters are kept.
  void place(const Pose& pose, Vec2 start, const SimParams& params);

 private:
  void randomize_obstacles(Rng& rng);

  GridMap base_map_;
  GridMap map_;
  EnvConfig cfg_;
  DiversityRanges ranges_;
  SimParams params_{};
  RobotState robot_{};
  Velocity applied_target_{};
  LidarScan scan_{};
  Vec2 start_{};
  double frame_angle_ = 0.0;
  double planning_distance_ = 0.0;
  int steps_ = 0;
  bool terminal_ = false;
  bool started_ = false;
};

}  // namespace color::sim

#pragma once

#include <algorithm>
#include <cmath>

namespace color::sim {

/// Linear (cm/s) and angular (rad/s) velocity.
struct Velocity {
  double linear = 0.0;
  double angular = 0.0;

  friend bool operator==(const Velocity&, const Velocity&) = default;
};

struct VelocityLimits {
  double linear_max = 18.0;
  double angular_max = 1.0;
};

/// First-order velocity response: v' = K v + (1 - K) v_target, clamped per axis.
/// K lumps inertia, friction and the low-level motion controller together.
inline Velocity apply_kinematics(Velocity v, Velocity target, double k, VelocityLimits limits) {
  const double lin = k * v.linear + (1.0 - k) * target.linear;
  const double ang = k * v.angular + (1.0 - k) * target.angular;
  return {std::clamp(lin, -limits.linear_max, limits.linear_max),
          std::clamp(ang, -limits.angular_max, limits.angular_max)};
}

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * M_PI;
  a = std::fmod(a, kTwoPi);
  if (a <= -M_PI) a += kTwoPi;
  if (a > M_PI) a -= kTwoPi;
  return a;
}

/// Exact unicycle integration with velocities held constant over dt.
inline Pose integrate_unicycle(Pose p, Velocity v, double dt) {
  constexpr double kStraight = 1e-6;
  Pose out = p;
  if (std::abs(v.angular) < kStraight) {
    out.x += v.linear * std::cos(p.heading) * dt;
    out.y += v.linear * std::sin(p.heading) * dt;
  } else {
    const double r = v.linear / v.angular;
    const double th1 = p.heading + v.angular * dt;
    out.x += r * (std::sin(th1) - std::sin(p.heading));
    out.y -= r * (std::cos(th1) - std::cos(p.heading));
  }
  out.heading = wrap_angle(p.heading + v.angular * dt);
  return out;
}

}  // namespace color::sim

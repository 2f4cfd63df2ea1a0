#pragma once

#include <array>
#include <cmath>
#include <span>

#include "color/rng.hpp"
#include "color/sim/grid_map.hpp"
#include "color/sim/kinematics.hpp"

namespace color::sim {

inline constexpr int kLidarBeams = 27;
using LidarScan = std::array<double, kLidarBeams>;

struct LidarConfig {
  double fov_rad = 1.5 * M_PI;  // 270 degrees
  double max_range_cm = 300.0;

  /// Beam k's angle relative to the heading; beams evenly span the FOV.
  double beam_offset(int k) const {
    return -fov_rad / 2.0 + fov_rad * static_cast<double>(k) / (kLidarBeams - 1);
  }
};

/// Distance along a ray from `origin` to the first occupied cell, capped at
/// `max_range`. Grid traversal (Amanatides-Woo); exact up to cell resolution.
double cast_ray(const GridMap& map, Vec2 origin, double angle, double max_range);

/// Noise-free scan from the robot centre.
LidarScan lidar_scan(const GridMap& map, const Pose& pose, const LidarConfig& cfg);

/// Scan with additive zero-mean Gaussian noise, clamped to [0, max_range].
LidarScan lidar_scan(const GridMap& map, const Pose& pose, const LidarConfig& cfg, double noise_std,
                     Rng& rng);

/// Disc of `radius` at `centre` overlaps an occupied cell or leaves the map.
bool check_collision(const GridMap& map, Vec2 centre, double radius);

}  // namespace color::sim

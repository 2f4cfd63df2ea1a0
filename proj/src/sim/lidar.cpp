#include "color/sim/lidar.hpp"

#include <algorithm>
#include <limits>

namespace color::sim {

double cast_ray(const GridMap& map, Vec2 origin, double angle, double max_range) {
  const double cs = map.cell_size_cm();
  const double dx = std::cos(angle);
  const double dy = std::sin(angle);
  int col = static_cast<int>(std::floor(origin.x / cs));
  int row = static_cast<int>(std::floor(origin.y / cs));
  if (map.occupied(col, row)) return 0.0;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  const int step_c = dx > 0 ? 1 : -1;
  const int step_r = dy > 0 ? 1 : -1;
  // distance along the ray to the next vertical / horizontal cell boundary
  double t_max_c = kInf, t_max_r = kInf, t_delta_c = kInf, t_delta_r = kInf;
  if (dx != 0.0) {
    const double next_x = (dx > 0 ? col + 1 : col) * cs;
    t_max_c = (next_x - origin.x) / dx;
    t_delta_c = cs / std::abs(dx);
  }
  if (dy != 0.0) {
    const double next_y = (dy > 0 ? row + 1 : row) * cs;
    t_max_r = (next_y - origin.y) / dy;
    t_delta_r = cs / std::abs(dy);
  }
  for (;;) {
    double t;
    if (t_max_c < t_max_r) {
      t = t_max_c;
      col += step_c;
      t_max_c += t_delta_c;
    } else {
      t = t_max_r;
      row += step_r;
      t_max_r += t_delta_r;
    }
    if (t >= max_range) return max_range;
    if (map.occupied(col, row)) return std::max(0.0, t);
  }
}

LidarScan lidar_scan(const GridMap& map, const Pose& pose, const LidarConfig& cfg) {
  LidarScan scan{};
  const Vec2 origin{pose.x, pose.y};
  for (int k = 0; k < kLidarBeams; ++k) {
    scan[static_cast<std::size_t>(k)] =
        cast_ray(map, origin, pose.heading + cfg.beam_offset(k), cfg.max_range_cm);
  }
  return scan;
}

LidarScan lidar_scan(const GridMap& map, const Pose& pose, const LidarConfig& cfg, double noise_std,
                     Rng& rng) {
  LidarScan scan = lidar_scan(map, pose, cfg);
  if (noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_std);
    for (auto& d : scan) d = std::clamp(d + noise(rng), 0.0, cfg.max_range_cm);
  }
  return scan;
}

bool check_collision(const GridMap& map, Vec2 centre, double radius) {
  if (centre.x - radius < 0.0 || centre.y - radius < 0.0 || centre.x + radius > map.width_cm() ||
      centre.y + radius > map.height_cm()) {
    return true;
  }
  const double cs = map.cell_size_cm();
  const int c0 = static_cast<int>(std::floor((centre.x - radius) / cs));
  const int c1 = static_cast<int>(std::floor((centre.x + radius) / cs));
  const int r0 = static_cast<int>(std::floor((centre.y - radius) / cs));
  const int r1 = static_cast<int>(std::floor((centre.y + radius) / cs));
  const double r2 = radius * radius;
  for (int row = r0; row <= r1; ++row) {
    const double y_lo = row * cs;
    const double ny = std::clamp(centre.y, y_lo, y_lo + cs) - centre.y;
    for (int col = c0; col <= c1; ++col) {
      if (!map.occupied(col, row)) continue;
      const double x_lo = col * cs;
      const double nx = std::clamp(centre.x, x_lo, x_lo + cs) - centre.x;
      if (nx * nx + ny * ny < r2) return true;
    }
  }
  return false;
}

}  // namespace color::sim

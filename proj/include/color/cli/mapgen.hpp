#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "color/sim/grid_map.hpp"

namespace color::cli {

/// Procedural training/test maps: spawn region in the lower-left corner,
/// goal disc in the upper-right, random rectangular obstacles in between.
struct MapGenOptions {
  int size_cm = 366;
  int cell_size_cm = 1;
  double density = 0.1;  // occupied fraction of the interior, excluding walls
  std::uint64_t seed = 0;
  double robot_radius_cm = 9.0;
  double spawn_size_cm = 60.0;
  double corner_margin_cm = 20.0;
  double goal_radius_cm = 20.0;
  double min_obstacle_cm = 15.0;
  double max_obstacle_cm = 60.0;
  int max_attempts = 200;
};

/// Map number `index` of the family defined by `opts`. Deterministic in
/// (opts, index); every returned map is connected spawn -> goal for a disc of
/// the robot radius. Throws MapError when the density cannot be met.
sim::GridMap generate_map(const MapGenOptions& opts, std::uint64_t index);

/// Writes `count` maps as `map_000.map`, ... into `out_dir`.
std::vector<std::filesystem::path> write_maps(const MapGenOptions& opts, int count,
                                              const std::filesystem::path& out_dir);

}  // namespace color::cli

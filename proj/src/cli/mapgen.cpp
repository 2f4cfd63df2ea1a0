#include "color/cli/mapgen.hpp"

#include <cmath>
#include <cstdio>

#include "color/errors.hpp"
#include "color/rng.hpp"

namespace color::cli {

namespace fs = std::filesystem;

sim::GridMap generate_map(const MapGenOptions& opts, std::uint64_t index) {
  if (opts.density < 0.0 || opts.density >= 1.0) throw MapError("obstacle density must lie in [0, 1)");
  if (opts.min_obstacle_cm <= 0.0 || opts.max_obstacle_cm < opts.min_obstacle_cm) {
    throw MapError("invalid obstacle size range");
  }
  const double size = opts.size_cm;
  const double lo = opts.corner_margin_cm;
  const sim::Rect spawn{lo, lo, lo + opts.spawn_size_cm, lo + opts.spawn_size_cm};
  const sim::Vec2 goal{size - lo - opts.spawn_size_cm / 2.0, size - lo - opts.spawn_size_cm / 2.0};
  const double margin = 2.0 * opts.robot_radius_cm;

  Rng rng(derive_seed(opts.seed, index));
  std::uniform_real_distribution<double> extent(opts.min_obstacle_cm, opts.max_obstacle_cm);
  std::uniform_real_distribution<double> pos(0.0, size);

  for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
    sim::GridMap map(opts.size_cm, opts.size_cm, opts.cell_size_cm);
    map.set_goal(goal, opts.goal_radius_cm);
    map.set_spawn_region(spawn);
    const std::size_t walls = map.occupied_count();
    const double interior =
        static_cast<double>(map.cols() - 2) * static_cast<double>(map.rows() - 2);
    const auto target = static_cast<std::size_t>(std::llround(opts.density * interior));

    int tries = 0;
    while (map.occupied_count() - walls < target && tries++ < 10'000) {
      const double w = extent(rng), h = extent(rng);
      const double x = pos(rng), y = pos(rng);
      const sim::Rect r{x, y, std::min(x + w, size), std::min(y + h, size)};
      const bool hits_spawn = r.x_min < spawn.x_max + margin && r.x_max > spawn.x_min - margin &&
                              r.y_min < spawn.y_max + margin && r.y_max > spawn.y_min - margin;
      const double nx = std::clamp(goal.x, r.x_min, r.x_max) - goal.x;
      const double ny = std::clamp(goal.y, r.y_min, r.y_max) - goal.y;
      if (hits_spawn || std::hypot(nx, ny) < opts.goal_radius_cm + margin) continue;
      map.fill_rect(r, true);
    }
    if (map.occupied_count() - walls < target) continue;
    if (map.connected(opts.robot_radius_cm)) {
      map.validate();
      return map;
    }
  }
  throw MapError("could not generate a connected map at density " + std::to_string(opts.density));
}

std::vector<fs::path> write_maps(const MapGenOptions& opts, int count, const fs::path& out_dir) {
  if (count < 0) throw MapError("map count must be non-negative");
  fs::create_directories(out_dir);
  std::vector<fs::path> files;
  for (int i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "map_%03d.map", i);
    const auto path = out_dir / name;
    sim::save_map(path, generate_map(opts, static_cast<std::uint64_t>(i)));
    files.push_back(path);
  }
  return files;
}

}  // namespace color::cli

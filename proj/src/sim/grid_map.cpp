#include "color/sim/grid_map.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

#include "color/errors.hpp"

namespace color::sim {

GridMap::GridMap(int width_cm, int height_cm, int cell_size_cm)
    : width_cm_(width_cm), height_cm_(height_cm), cell_size_cm_(cell_size_cm) {
  if (cell_size_cm <= 0 || width_cm <= 0 || height_cm <= 0) {
    throw MapError("map dimensions must be positive");
  }
  if (width_cm % cell_size_cm != 0 || height_cm % cell_size_cm != 0) {
    throw MapError("map size must be a multiple of the cell size");
  }
  cols_ = width_cm / cell_size_cm;
  rows_ = height_cm / cell_size_cm;
  if (cols_ < 3 || rows_ < 3) throw MapError("map needs at least 3x3 cells");
  occ_.assign(static_cast<std::size_t>(cols_) * static_cast<std::size_t>(rows_), 0);
  for (int c = 0; c < cols_; ++c) {
    occ_[index(c, 0)] = 1;
    occ_[index(c, rows_ - 1)] = 1;
  }
  for (int r = 0; r < rows_; ++r) {
    occ_[index(0, r)] = 1;
    occ_[index(cols_ - 1, r)] = 1;
  }
  goal_center_ = {width_cm / 2.0, height_cm / 2.0};
  goal_radius_cm_ = cell_size_cm;
  spawn_ = {goal_center_.x, goal_center_.y, goal_center_.x, goal_center_.y};
}

double GridMap::diagonal_cm() const {
  return std::hypot(static_cast<double>(width_cm_), static_cast<double>(height_cm_));
}

bool GridMap::occupied_at(Vec2 p) const {
  const int col = static_cast<int>(std::floor(p.x / cell_size_cm_));
  const int row = static_cast<int>(std::floor(p.y / cell_size_cm_));
  return occupied(col, row);
}

void GridMap::set_occupied(int col, int row, bool value) {
  if (!in_bounds_cell(col, row)) return;
  if (is_border(col, row)) return;
  occ_[index(col, row)] = value ? 1 : 0;
}

void GridMap::fill_rect(const Rect& r, bool value) {
  const int c0 = std::max(0, static_cast<int>(std::floor(r.x_min / cell_size_cm_)));
  const int r0 = std::max(0, static_cast<int>(std::floor(r.y_min / cell_size_cm_)));
  const int c1 = std::min(cols_ - 1, static_cast<int>(std::ceil(r.x_max / cell_size_cm_)) - 1);
  const int r1 = std::min(rows_ - 1, static_cast<int>(std::ceil(r.y_max / cell_size_cm_)) - 1);
  for (int row = r0; row <= r1; ++row) {
    for (int col = c0; col <= c1; ++col) set_occupied(col, row, value);
  }
}

std::size_t GridMap::occupied_count() const {
  return static_cast<std::size_t>(std::count(occ_.begin(), occ_.end(), std::uint8_t{1}));
}

void GridMap::set_goal(Vec2 center, double radius_cm) {
  goal_center_ = center;
  goal_radius_cm_ = radius_cm;
}

void GridMap::validate() const {
  if (cols_ <= 0) throw MapError("map is empty");
  if (!(goal_radius_cm_ > 0.0)) throw MapError("goal radius must be positive");
  if (goal_center_.x < 0 || goal_center_.y < 0 || goal_center_.x >= width_cm_ ||
      goal_center_.y >= height_cm_) {
    throw MapError("goal centre outside map bounds");
  }
  if (occupied_at(goal_center_)) throw MapError("goal centre lies on an obstacle");
  if (spawn_.x_min > spawn_.x_max || spawn_.y_min > spawn_.y_max) {
    throw MapError("spawn region is inverted");
  }
}

std::vector<std::uint8_t> GridMap::traversable(double clearance_cm) const {
  const int half = static_cast<int>(std::ceil(clearance_cm / cell_size_cm_));
  // 2D prefix sum of occupancy, (cols+1) x (rows+1)
  const std::size_t w = static_cast<std::size_t>(cols_) + 1;
  std::vector<std::int32_t> sum(w * (static_cast<std::size_t>(rows_) + 1), 0);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      sum[(r + 1) * w + (c + 1)] = occ_[index(c, r)] + sum[r * w + (c + 1)] +
                                   sum[(r + 1) * w + c] - sum[r * w + c];
    }
  }
  std::vector<std::uint8_t> out(occ_.size(), 0);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      const int c0 = c - half, r0 = r - half, c1 = c + half + 1, r1 = r + half + 1;
      if (c0 < 0 || r0 < 0 || c1 > cols_ || r1 > rows_) continue;
      const auto blocked = sum[r1 * w + c1] - sum[r0 * w + c1] - sum[r1 * w + c0] + sum[r0 * w + c0];
      out[index(c, r)] = blocked == 0 ? 1 : 0;
    }
  }
  return out;
}

bool GridMap::connected(double clearance_cm) const {
  const auto free = traversable(clearance_cm);
  const double cs = cell_size_cm_;
  std::vector<std::uint8_t> seen(free.size(), 0);
  std::deque<std::pair<int, int>> frontier;
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      const Vec2 centre{(c + 0.5) * cs, (r + 0.5) * cs};
      if (free[index(c, r)] && spawn_.contains(centre)) {
        seen[index(c, r)] = 1;
        frontier.emplace_back(c, r);
      }
    }
  }
  constexpr int dc[] = {1, -1, 0, 0};
  constexpr int dr[] = {0, 0, 1, -1};
  while (!frontier.empty()) {
    const auto [c, r] = frontier.front();
    frontier.pop_front();
    const double dx = (c + 0.5) * cs - goal_center_.x;
    const double dy = (r + 0.5) * cs - goal_center_.y;
    if (std::hypot(dx, dy) <= goal_radius_cm_) return true;
    for (int k = 0; k < 4; ++k) {
      const int nc = c + dc[k], nr = r + dr[k];
      if (!in_bounds_cell(nc, nr)) continue;
      const auto i = index(nc, nr);
      if (seen[i] || !free[i]) continue;
      seen[i] = 1;
      frontier.emplace_back(nc, nr);
    }
  }
  return false;
}

std::string GridMap::ascii() const {
  std::ostringstream os;
  write_map(os, *this);
  return os.str();
}

GridMap parse_map(std::istream& in) {
  int width = 0, height = 0, cell = 0;
  if (!(in >> width >> height >> cell)) throw MapError("map header must be `width height cell_size`");
  GridMap map(width, height, cell);
  std::string line;
  std::getline(in, line);  // rest of header line

  double gx = 0, gy = 0;
  std::vector<Vec2> goal_cells;
  bool have_spawn = false;
  Rect spawn{};
  for (int text_row = 0; text_row < map.rows(); ++text_row) {
    if (!std::getline(in, line)) throw MapError("map has fewer rows than its header declares");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (static_cast<int>(line.size()) != map.cols()) {
      throw MapError("map row " + std::to_string(text_row) + " has " + std::to_string(line.size()) +
                     " characters, expected " + std::to_string(map.cols()));
    }
    const int row = map.rows() - 1 - text_row;
    for (int col = 0; col < map.cols(); ++col) {
      const char ch = line[static_cast<std::size_t>(col)];
      const double x0 = col * static_cast<double>(cell), y0 = row * static_cast<double>(cell);
      switch (ch) {
        case '#':
          map.set_occupied(col, row, true);
          break;
        case '.':
          break;
        case 'G':
          goal_cells.push_back({x0 + cell / 2.0, y0 + cell / 2.0});
          gx += x0 + cell / 2.0;
          gy += y0 + cell / 2.0;
          break;
        case 'S':
          if (!have_spawn) {
            spawn = {x0, y0, x0 + cell, y0 + cell};
            have_spawn = true;
          } else {
            spawn.x_min = std::min(spawn.x_min, x0);
            spawn.y_min = std::min(spawn.y_min, y0);
            spawn.x_max = std::max(spawn.x_max, x0 + cell);
            spawn.y_max = std::max(spawn.y_max, y0 + cell);
          }
          break;
        default:
          throw MapError(std::string("unknown map character '") + ch + "'");
      }
    }
  }
  if (goal_cells.empty()) throw MapError("map has no goal (G) cells");
  if (!have_spawn) throw MapError("map has no spawn (S) cells");
  const Vec2 centre{gx / goal_cells.size(), gy / goal_cells.size()};
  double radius = 0.0;
  for (const auto& p : goal_cells) radius = std::max(radius, std::hypot(p.x - centre.x, p.y - centre.y));
  map.set_goal(centre, radius + cell / 2.0);
  map.set_spawn_region(spawn);
  map.validate();
  return map;
}

GridMap load_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MapError("cannot open map file " + path.string());
  try {
    return parse_map(in);
  } catch (const MapError& e) {
    throw MapError(path.string() + ": " + e.what());
  }
}

void write_map(std::ostream& out, const GridMap& map) {
  const double cs = map.cell_size_cm();
  out << map.width_cm() << ' ' << map.height_cm() << ' ' << map.cell_size_cm() << '\n';
  // G cells are written inside radius - cell/2 so that parsing reproduces the radius
  const double g_write = std::max(0.0, map.goal_radius_cm() - cs / 2.0);
  std::string line(static_cast<std::size_t>(map.cols()), '.');
  for (int row = map.rows() - 1; row >= 0; --row) {
    for (int col = 0; col < map.cols(); ++col) {
      const Vec2 centre{(col + 0.5) * cs, (row + 0.5) * cs};
      char ch = '.';
      if (map.occupied(col, row)) {
        ch = '#';
      } else if (std::hypot(centre.x - map.goal_center().x, centre.y - map.goal_center().y) <= g_write + 1e-9) {
        ch = 'G';
      } else if (map.spawn_region().contains(centre)) {
        ch = 'S';
      }
      line[static_cast<std::size_t>(col)] = ch;
    }
    out << line << '\n';
  }
}

void save_map(const std::filesystem::path& path, const GridMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MapError("cannot write map file " + path.string());
  write_map(out, map);
}

std::vector<std::filesystem::path> list_map_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dir)) throw MapError("not a directory: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".map") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw MapError("no .map files in " + dir.string());
  return files;
}

}  // namespace color::sim

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace color::sim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Axis-aligned rectangle in cm, [min, max] inclusive.
struct Rect {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  bool contains(Vec2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Occupancy grid world. Cell (col, row) covers
/// [col*cell, (col+1)*cell) x [row*cell, (row+1)*cell) in cm; row 0 is y = 0.
class GridMap {
 public:
  GridMap() = default;
  /// Empty map with border walls. Goal and spawn default to the map centre.
  GridMap(int width_cm, int height_cm, int cell_size_cm);

  int width_cm() const { return width_cm_; }
  int height_cm() const { return height_cm_; }
  int cell_size_cm() const { return cell_size_cm_; }
  int cols() const { return cols_; }
  int rows() const { return rows_; }
  double diagonal_cm() const;

  bool in_bounds_cell(int col, int row) const {
    return col >= 0 && row >= 0 && col < cols_ && row < rows_;
  }
  /// Out-of-bounds cells read as occupied.
  bool occupied(int col, int row) const {
    return !in_bounds_cell(col, row) || occ_[index(col, row)] != 0;
  }
  bool occupied_at(Vec2 p) const;
  /// Border cells stay occupied regardless of the value written.
  void set_occupied(int col, int row, bool value);
  void fill_rect(const Rect& r, bool value);
  std::size_t occupied_count() const;
  const std::vector<std::uint8_t>& occupancy() const { return occ_; }

  Vec2 goal_center() const { return goal_center_; }
  double goal_radius_cm() const { return goal_radius_cm_; }
  const Rect& spawn_region() const { return spawn_; }
  void set_goal(Vec2 center, double radius_cm);
  void set_spawn_region(const Rect& r) { spawn_ = r; }

  /// Checks the structural invariants; throws MapError on violation.
  void validate() const;

  /// True when a disc of `clearance_cm` can travel (4-connected) from the
  /// spawn region to the goal centre without touching occupied cells.
  bool connected(double clearance_cm) const;

  /// Cell-level view marking free cells whose clearance box is obstacle free.
  std::vector<std::uint8_t> traversable(double clearance_cm) const;

  std::string ascii() const;

  friend bool operator==(const GridMap&, const GridMap&) = default;

 private:
  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(col);
  }
  bool is_border(int col, int row) const {
    return col == 0 || row == 0 || col == cols_ - 1 || row == rows_ - 1;
  }

  int width_cm_ = 0;
  int height_cm_ = 0;
  int cell_size_cm_ = 1;
  int cols_ = 0;
  int rows_ = 0;
  std::vector<std::uint8_t> occ_;
  Vec2 goal_center_{};
  double goal_radius_cm_ = 1.0;
  Rect spawn_{};
};

/// Text map format: header `width height cell_size` (cm), then one line per
/// grid row, top row first. `#` obstacle, `.` free, `G` goal cell, `S` spawn cell.
GridMap parse_map(std::istream& in);
GridMap load_map(const std::filesystem::path& path);
void write_map(std::ostream& out, const GridMap& map);
void save_map(const std::filesystem::path& path, const GridMap& map);

/// All `*.map` files in `dir`, sorted by filename.
std::vector<std::filesystem::path> list_map_files(const std::filesystem::path& dir);

}  // namespace color::sim

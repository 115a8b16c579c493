#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "egocorridor/geometry.hpp"

namespace egocorridor {

/// Binary obstacle map in the vehicle-leveled frame. Cell (0,0) has its
/// lower-left corner at `origin`; cells are row-major (index = j * width + i).
struct OccupancyGrid {
  Point2 origin;
  double resolution = 0.2;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> cells;  // 1 = obstacle

  bool obstacle(int i, int j) const { return cells[static_cast<std::size_t>(j) * width + i] != 0; }
  bool in_bounds(int i, int j) const { return i >= 0 && j >= 0 && i < width && j < height; }
};

bool is_valid(const OccupancyGrid& grid);

enum class CellState : std::uint8_t { Visible, Occluded, Obstacle };

struct VisibilityGrid {
  Point2 origin;
  double resolution = 0.2;
  int width = 0;
  int height = 0;
  std::vector<CellState> cells;

  CellState at(int i, int j) const { return cells[static_cast<std::size_t>(j) * width + i]; }
};

/// Half-open rectangle of cell indices [i0, i1) x [j0, j1).
struct CellWindow {
  int i0 = 0;
  int j0 = 0;
  int i1 = 0;
  int j1 = 0;
};

/// Cells whose footprint intersects the world-space box, clamped to the grid.
CellWindow window_covering(const OccupancyGrid& grid, const Bounds2& box);

/// True when the closed segment from `sensor` (grid cell units) to the centre
/// of cell (ti, tj) touches an obstacle cell other than the target. Cells are
/// visited column by column, every cell whose closed square meets the segment
/// (supercover), so shadows do not leak through cell corners.
bool ray_blocked(const OccupancyGrid& grid, Point2 sensor_cells, int ti, int tj);

/// Per-cell visibility from `sensor` (world coordinates). Cells outside the
/// optional window are not traced and stay Visible unless they are obstacles.
/// Parallel over cells with OpenMP.
VisibilityGrid visibility_from(const OccupancyGrid& grid, Point2 sensor,
                               const std::optional<CellWindow>& window = std::nullopt);

/// Single-threaded reference of visibility_from.
VisibilityGrid visibility_from_serial(const OccupancyGrid& grid, Point2 sensor,
                                      const std::optional<CellWindow>& window = std::nullopt);

/// Footprints of all Occluded and Obstacle cells. Horizontal runs within a row
/// are merged into one rectangle.
std::vector<Polygon2> occluded_polygons(const VisibilityGrid& vis,
                                        const std::optional<CellWindow>& window = std::nullopt);

}  // namespace egocorridor

#include "egocorridor/occlusion.hpp"

#include <algorithm>
#include <cmath>

#include "egocorridor/error.hpp"

namespace egocorridor {

bool is_valid(const OccupancyGrid& grid) {
  return grid.resolution > 0.0 && std::isfinite(grid.resolution) && grid.width >= 1 && grid.height >= 1 &&
         is_finite(grid.origin) &&
         grid.cells.size() == static_cast<std::size_t>(grid.width) * static_cast<std::size_t>(grid.height);
}

CellWindow window_covering(const OccupancyGrid& grid, const Bounds2& box) {
  auto cell = [&](double v, double o) { return static_cast<int>(std::floor((v - o) / grid.resolution)); };
  CellWindow w;
  w.i0 = std::clamp(cell(box.min.x, grid.origin.x), 0, grid.width);
  w.j0 = std::clamp(cell(box.min.y, grid.origin.y), 0, grid.height);
  w.i1 = std::clamp(cell(box.max.x, grid.origin.x) + 1, 0, grid.width);
  w.j1 = std::clamp(cell(box.max.y, grid.origin.y) + 1, 0, grid.height);
  return w;
}

bool ray_blocked(const OccupancyGrid& grid, Point2 sensor_cells, int ti, int tj) {
  const double x0 = sensor_cells.x;
  const double y0 = sensor_cells.y;
  const double x1 = ti + 0.5;
  const double y1 = tj + 0.5;
  const double dx = x1 - x0;
  const double dy = y1 - y0;

  auto blocked_rows = [&](int col, double ya, double yb) {
    if (col < 0 || col >= grid.width) return false;
    const double lo = std::min(ya, yb);
    const double hi = std::max(ya, yb);
    const int r0 = std::max(static_cast<int>(std::ceil(lo)) - 1, 0);
    const int r1 = std::min(static_cast<int>(std::floor(hi)), grid.height - 1);
    for (int r = r0; r <= r1; ++r) {
      if (col == ti && r == tj) continue;
      if (grid.obstacle(col, r)) return true;
    }
    return false;
  };

  if (dx == 0.0) {
    for (int c = static_cast<int>(std::ceil(x0)) - 1; c <= static_cast<int>(std::floor(x0)); ++c)
      if (blocked_rows(c, y0, y1)) return true;
    return false;
  }

  const double xmin = std::min(x0, x1);
  const double xmax = std::max(x0, x1);
  const int c0 = std::max(static_cast<int>(std::ceil(xmin)) - 1, 0);
  const int c1 = std::min(static_cast<int>(std::floor(xmax)), grid.width - 1);
  for (int c = c0; c <= c1; ++c) {
    const double xa = std::max(static_cast<double>(c), xmin);
    const double xb = std::min(static_cast<double>(c + 1), xmax);
    if (xa > xb) continue;
    const double ya = y0 + ((xa - x0) * dy) / dx;
    const double yb = y0 + ((xb - x0) * dy) / dx;
    if (blocked_rows(c, ya, yb)) return true;
  }
  return false;
}

namespace {

Point2 sensor_in_cells(const OccupancyGrid& grid, Point2 sensor) {
  if (!is_valid(grid)) throw Error(ErrorKind::InvalidArgument, "invalid occupancy grid");
  const Point2 s{(sensor.x - grid.origin.x) / grid.resolution, (sensor.y - grid.origin.y) / grid.resolution};
  if (!(s.x >= 0.0 && s.y >= 0.0 && s.x < grid.width && s.y < grid.height))
    throw Error(ErrorKind::SensorOutOfGrid, "sensor lies outside the occupancy grid");
  if (grid.obstacle(static_cast<int>(s.x), static_cast<int>(s.y)))
    throw Error(ErrorKind::SensorInsideObstacle, "sensor lies inside an obstacle cell");
  return s;
}

VisibilityGrid init_visibility(const OccupancyGrid& grid) {
  VisibilityGrid vis{grid.origin, grid.resolution, grid.width, grid.height, {}};
  vis.cells.resize(grid.cells.size());
  for (std::size_t k = 0; k < grid.cells.size(); ++k)
    vis.cells[k] = grid.cells[k] != 0 ? CellState::Obstacle : CellState::Visible;
  return vis;
}

CellWindow full_window(const OccupancyGrid& grid) { return {0, 0, grid.width, grid.height}; }

void trace_row(const OccupancyGrid& grid, Point2 s, int j, const CellWindow& w, VisibilityGrid& vis) {
  for (int i = w.i0; i < w.i1; ++i) {
    const std::size_t k = static_cast<std::size_t>(j) * grid.width + i;
    if (vis.cells[k] == CellState::Obstacle) continue;
    if (ray_blocked(grid, s, i, j)) vis.cells[k] = CellState::Occluded;
  }
}

}  // namespace

VisibilityGrid visibility_from(const OccupancyGrid& grid, Point2 sensor, const std::optional<CellWindow>& window) {
  const Point2 s = sensor_in_cells(grid, sensor);
  VisibilityGrid vis = init_visibility(grid);
  const CellWindow w = window.value_or(full_window(grid));
#pragma omp parallel for schedule(dynamic, 4)
  for (int j = w.j0; j < w.j1; ++j) trace_row(grid, s, j, w, vis);
  return vis;
}

VisibilityGrid visibility_from_serial(const OccupancyGrid& grid, Point2 sensor,
                                      const std::optional<CellWindow>& window) {
  const Point2 s = sensor_in_cells(grid, sensor);
  VisibilityGrid vis = init_visibility(grid);
  const CellWindow w = window.value_or(full_window(grid));
  for (int j = w.j0; j < w.j1; ++j) trace_row(grid, s, j, w, vis);
  return vis;
}

std::vector<Polygon2> occluded_polygons(const VisibilityGrid& vis, const std::optional<CellWindow>& window) {
  const CellWindow w = window.value_or(CellWindow{0, 0, vis.width, vis.height});
  std::vector<Polygon2> out;
  const double r = vis.resolution;
  for (int j = w.j0; j < w.j1; ++j) {
    int i = w.i0;
    while (i < w.i1) {
      if (vis.at(i, j) == CellState::Visible) {
        ++i;
        continue;
      }
      const int start = i;
      while (i < w.i1 && vis.at(i, j) != CellState::Visible) ++i;
      const double x0 = vis.origin.x + start * r;
      const double x1 = vis.origin.x + i * r;
      const double y0 = vis.origin.y + j * r;
      const double y1 = vis.origin.y + (j + 1) * r;
      out.push_back(Polygon2{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, Frame::VehicleLeveled});
    }
  }
  return out;
}

}  // namespace egocorridor

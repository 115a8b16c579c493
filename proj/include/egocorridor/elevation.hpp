#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "egocorridor/geometry.hpp"

namespace egocorridor {

/// Ground altitude observed at a map-frame position.
struct HeightSample {
  Point2 position;
  double altitude = 0.0;
};

inline constexpr double kMaxAbsAltitude = 10000.0;

/// Ground sample from a localization fix taken at the vehicle reference point.
/// The static mounting height is removed along the tilted body z axis.
HeightSample ground_sample_from_reference(const Pose& reference, double mount_height);

/// Mean-altitude grid over the driven route. Cell (0,0) has its lower-left
/// corner at `origin`; row-major storage. A cell is valid iff count > 0.
struct HeightMap {
  Point2 origin;
  double resolution = 1.0;
  int width = 0;
  int height = 0;
  std::vector<double> mean;
  std::vector<int> count;

  bool valid(int i, int j) const {
    return i >= 0 && j >= 0 && i < width && j < height && count[static_cast<std::size_t>(j) * width + i] > 0;
  }
  double value(int i, int j) const { return mean[static_cast<std::size_t>(j) * width + i]; }
  Point2 cell_center(int i, int j) const {
    return {origin.x + (i + 0.5) * resolution, origin.y + (j + 0.5) * resolution};
  }
};

/// Cell-aligned grid with a one-cell margin around all samples; each cell
/// holds the arithmetic mean of the samples that fall into it.
HeightMap build_height_map(std::span<const HeightSample> samples, double resolution);

/// Bilinear interpolation between the four surrounding cell centres. Invalid
/// neighbours are dropped and the remaining weights renormalised; with no
/// usable neighbour the nearest valid cell within 3 cells is used, otherwise
/// `fallback`.
double query_height(const HeightMap& map, Point2 p, double fallback);

/// Adds z = query_height(vertex) to every vertex. Edges should be densified
/// beforehand (see densify) so that long edges follow the terrain.
Polygon3 lift_polygon(const Polygon2& poly, const HeightMap& map, double fallback);

void save_height_map(const HeightMap& map, const std::filesystem::path& path);
HeightMap load_height_map(const std::filesystem::path& path);

}  // namespace egocorridor

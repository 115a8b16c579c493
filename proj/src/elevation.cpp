#include "egocorridor/elevation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "egocorridor/error.hpp"

namespace egocorridor {

HeightSample ground_sample_from_reference(const Pose& reference, double mount_height) {
  // Body z axis expressed in the map frame: Rz(yaw) * Rx(roll) * Ry(pitch) * e_z.
  const double cr = std::cos(reference.roll), sr = std::sin(reference.roll);
  const double cp = std::cos(reference.pitch), sp = std::sin(reference.pitch);
  const double cy = std::cos(reference.yaw), sy = std::sin(reference.yaw);
  const Point3 leveled{sp, -sr * cp, cr * cp};
  const Point3 up{cy * leveled.x - sy * leveled.y, sy * leveled.x + cy * leveled.y, leveled.z};
  const Point3 ground = reference.position - mount_height * up;
  return {{ground.x, ground.y}, ground.z};
}

HeightMap build_height_map(std::span<const HeightSample> samples, double resolution) {
  if (samples.empty()) throw Error(ErrorKind::EmptySamples, "height map needs at least one sample");
  if (!(resolution > 0.0)) throw Error(ErrorKind::InvalidArgument, "height map resolution must be positive");

  std::vector<Point2> pts;
  pts.reserve(samples.size());
  for (const HeightSample& s : samples) {
    if (!is_finite(s.position) || !std::isfinite(s.altitude) || std::abs(s.altitude) >= kMaxAbsAltitude)
      throw Error(ErrorKind::InvalidArgument, "height sample is not finite or out of range");
    pts.push_back(s.position);
  }
  const Bounds2 box = bounding_box(pts);
  const double ix0 = std::floor(box.min.x / resolution);
  const double iy0 = std::floor(box.min.y / resolution);

  HeightMap map;
  map.resolution = resolution;
  map.origin = {(ix0 - 1.0) * resolution, (iy0 - 1.0) * resolution};
  map.width = static_cast<int>(std::floor(box.max.x / resolution) - ix0) + 3;
  map.height = static_cast<int>(std::floor(box.max.y / resolution) - iy0) + 3;
  const std::size_t n = static_cast<std::size_t>(map.width) * map.height;
  map.mean.assign(n, 0.0);
  map.count.assign(n, 0);

  for (const HeightSample& s : samples) {
    const int i = std::clamp(static_cast<int>(std::floor((s.position.x - map.origin.x) / resolution)), 0, map.width - 1);
    const int j = std::clamp(static_cast<int>(std::floor((s.position.y - map.origin.y) / resolution)), 0, map.height - 1);
    const std::size_t k = static_cast<std::size_t>(j) * map.width + i;
    // Running mean.
    ++map.count[k];
    map.mean[k] += (s.altitude - map.mean[k]) / map.count[k];
  }
  return map;
}

double query_height(const HeightMap& map, Point2 p, double fallback) {
  if (map.width == 0 || map.height == 0) return fallback;
  const double gx = (p.x - map.origin.x) / map.resolution - 0.5;
  const double gy = (p.y - map.origin.y) / map.resolution - 0.5;
  if (!std::isfinite(gx) || !std::isfinite(gy)) return fallback;
  const double fi = std::floor(gx);
  const double fj = std::floor(gy);
  // Far outside the map: nothing within reach.
  if (fi < -5.0 || fj < -5.0 || fi > map.width + 5.0 || fj > map.height + 5.0) return fallback;
  const int i0 = static_cast<int>(fi);
  const int j0 = static_cast<int>(fj);
  const double tx = gx - fi;
  const double ty = gy - fj;

  const std::array<int, 4> di{0, 1, 0, 1};
  const std::array<int, 4> dj{0, 0, 1, 1};
  const std::array<double, 4> w{(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
  double acc = 0.0;
  double wsum = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    if (!map.valid(i0 + di[k], j0 + dj[k])) continue;
    acc += w[k] * map.value(i0 + di[k], j0 + dj[k]);
    wsum += w[k];
  }
  if (wsum > 1e-12) return acc / wsum;

  // Nearest valid cell centre around the cell containing p.
  const int ci = static_cast<int>(std::floor(gx + 0.5));
  const int cj = static_cast<int>(std::floor(gy + 0.5));
  double best = std::numeric_limits<double>::infinity();
  double value = fallback;
  for (int j = cj - 3; j <= cj + 3; ++j) {
    for (int i = ci - 3; i <= ci + 3; ++i) {
      if (!map.valid(i, j)) continue;
      const double d = distance(map.cell_center(i, j), p);
      if (d < best) {
        best = d;
        value = map.value(i, j);
      }
    }
  }
  return value;
}

Polygon3 lift_polygon(const Polygon2& poly, const HeightMap& map, double fallback) {
  Polygon3 out;
  out.vertices.reserve(poly.vertices.size());
  for (const Point2& p : poly.vertices) out.vertices.push_back({p.x, p.y, query_height(map, p, fallback)});
  return out;
}

void save_height_map(const HeightMap& map, const std::filesystem::path& path) {
  nlohmann::json j{{"origin", {map.origin.x, map.origin.y}},
                   {"resolution", map.resolution},
                   {"width", map.width},
                   {"height", map.height},
                   {"mean", map.mean},
                   {"count", map.count}};
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::IoError, "cannot write height map " + path.string());
  os << j.dump() << '\n';
}

HeightMap load_height_map(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::IoError, "cannot read height map " + path.string());
  try {
    const nlohmann::json j = nlohmann::json::parse(is);
    HeightMap map;
    map.origin = {j.at("origin").at(0).get<double>(), j.at("origin").at(1).get<double>()};
    map.resolution = j.at("resolution").get<double>();
    map.width = j.at("width").get<int>();
    map.height = j.at("height").get<int>();
    map.mean = j.at("mean").get<std::vector<double>>();
    map.count = j.at("count").get<std::vector<int>>();
    const std::size_t n = static_cast<std::size_t>(std::max(map.width, 0)) * std::max(map.height, 0);
    if (!(map.resolution > 0.0) || map.width < 1 || map.height < 1 || map.mean.size() != n || map.count.size() != n)
      throw Error(ErrorKind::SchemaError, "height map dimensions do not match its cell arrays");
    return map;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaError, "height map " + path.string() + ": " + e.what());
  }
}

}  // namespace egocorridor

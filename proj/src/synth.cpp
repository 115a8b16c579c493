#include "egocorridor/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

#include "egocorridor/error.hpp"
#include "egocorridor/objects.hpp"

namespace egocorridor {

std::string_view to_string(ScenarioKind kind) noexcept {
  switch (kind) {
    case ScenarioKind::Highway: return "highway";
    case ScenarioKind::SharpCurve: return "sharp_curve";
    case ScenarioKind::NoMarkings: return "no_markings";
    case ScenarioKind::ParkingCars: return "parking_cars";
    case ScenarioKind::Others: return "others";
  }
  return "unknown";
}

std::optional<ScenarioKind> scenario_kind_from_string(std::string_view name) noexcept {
  for (ScenarioKind k : kAllScenarioKinds)
    if (to_string(k) == name) return k;
  return std::nullopt;
}

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kStep = 0.5;
constexpr double kRoadLength = 115.0;
constexpr double kBehind = 2.0;

// Bit-level uniform draws; the standard distributions are not portable.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    engine_.seed(seq);
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  int integer(int lo, int hi) { return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  bool chance(double p) { return uniform(0.0, 1.0) < p; }
  double sign() { return chance(0.5) ? 1.0 : -1.0; }

 private:
  std::mt19937_64 engine_;
};

struct Road {
  std::vector<Point2> center;
  std::vector<double> heading;
  double width = 3.5;

  Point2 at(double s) const {
    const auto i = std::min(static_cast<std::size_t>(std::max(s + kBehind, 0.0) / kStep), center.size() - 1);
    return center[i];
  }
  double heading_at(double s) const {
    const auto i = std::min(static_cast<std::size_t>(std::max(s + kBehind, 0.0) / kStep), heading.size() - 1);
    return heading[i];
  }
  Point2 offset(double s, double lateral) const {
    const double h = heading_at(s);
    const Point2 c = at(s);
    return {c.x - lateral * std::sin(h), c.y + lateral * std::cos(h)};
  }
};

/// Integrates a curvature profile starting kBehind metres behind the ego.
Road make_road(Rng& rng, ScenarioKind kind) {
  Road road;
  double k_const = 0.0;
  double curve_start = 1e9, curve_len = 0.0, curve_k = 0.0;
  double wiggle_amp = 0.0, wiggle_freq = 0.0, wiggle_phase = 0.0;
  switch (kind) {
    case ScenarioKind::Highway:
      road.width = rng.uniform(3.5, 3.9);
      k_const = rng.uniform(-0.003, 0.003);
      break;
    case ScenarioKind::SharpCurve:
      road.width = rng.uniform(3.3, 3.8);
      curve_start = rng.uniform(8.0, 20.0);
      curve_k = rng.sign() * rng.uniform(0.05, 0.07);
      curve_len = rng.uniform(60.0, 110.0) * kDeg / std::abs(curve_k);
      break;
    case ScenarioKind::NoMarkings:
      road.width = rng.uniform(5.5, 7.0);
      wiggle_amp = rng.uniform(0.004, 0.012);
      wiggle_freq = rng.uniform(0.02, 0.05);
      wiggle_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      break;
    case ScenarioKind::ParkingCars:
      road.width = rng.uniform(4.8, 5.6);
      k_const = rng.uniform(-0.002, 0.002);
      break;
    case ScenarioKind::Others:
      road.width = rng.uniform(3.5, 4.5);
      wiggle_amp = rng.uniform(0.0, 0.01);
      wiggle_freq = rng.uniform(0.02, 0.05);
      wiggle_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      break;
  }
  Point2 p{-kBehind, rng.uniform(-0.3, 0.3)};
  double h = rng.uniform(-2.0, 2.0) * kDeg;
  p.y -= kBehind * std::sin(h);
  const auto n = static_cast<std::size_t>(kRoadLength / kStep) + 1;
  for (std::size_t i = 0; i < n; ++i) {
    road.center.push_back(p);
    road.heading.push_back(h);
    const double s = static_cast<double>(i) * kStep - kBehind;
    double k = k_const + wiggle_amp * std::sin(wiggle_freq * s * 2.0 * std::numbers::pi + wiggle_phase);
    if (s >= curve_start && s < curve_start + curve_len) k += curve_k;
    // Midpoint rule keeps the arc length exact.
    const double hm = h + 0.5 * kStep * k;
    p = {p.x + kStep * std::cos(hm), p.y + kStep * std::sin(hm)};
    h += kStep * k;
  }
  return road;
}

TrackedObject along_road(const Road& road, double s, double lateral, double length, double width, double speed,
                         ObjectClass cls, double yaw_offset = 0.0) {
  return {road.offset(s, lateral), road.heading_at(s) + yaw_offset, length, width, speed, cls};
}

std::vector<TrackedObject> make_objects(Rng& rng, ScenarioKind kind, const Road& road) {
  std::vector<TrackedObject> objs;
  const double half = 0.5 * road.width;
  switch (kind) {
    case ScenarioKind::Highway:
      if (rng.chance(0.6))
        objs.push_back(along_road(road, rng.uniform(25.0, 60.0), rng.uniform(-0.4, 0.4), rng.uniform(4.2, 5.0), 1.9,
                                  rng.uniform(20.0, 35.0), ObjectClass::Car));
      if (rng.chance(0.5))
        objs.push_back(along_road(road, rng.uniform(15.0, 50.0), rng.sign() * (road.width + rng.uniform(-0.2, 0.3)),
                                  rng.uniform(9.0, 16.0), 2.5, rng.uniform(18.0, 28.0), ObjectClass::Truck));
      break;
    case ScenarioKind::SharpCurve:
      if (rng.chance(0.4))
        objs.push_back(along_road(road, rng.uniform(18.0, 40.0), rng.uniform(-0.3, 0.3), 4.5, 1.8,
                                  rng.uniform(5.0, 12.0), ObjectClass::Car));
      break;
    case ScenarioKind::NoMarkings:
      if (rng.chance(0.5))
        objs.push_back(along_road(road, rng.uniform(20.0, 45.0), rng.uniform(-half, half) * 0.5, 1.8, 0.6,
                                  rng.uniform(3.0, 6.0), ObjectClass::Cyclist));
      break;
    case ScenarioKind::ParkingCars: {
      double s = rng.uniform(15.0, 22.0);
      const int cars = rng.integer(1, 3);
      for (int c = 0; c < cars; ++c) {
        // Parked against the right boundary, slightly into the corridor.
        const double w = rng.uniform(1.75, 1.95);
        objs.push_back(along_road(road, s, -(half + 0.5 * w - rng.uniform(0.2, 0.6)), rng.uniform(4.2, 4.8), w, 0.0,
                                  ObjectClass::Car));
        s += rng.uniform(6.0, 12.0);
      }
      break;
    }
    case ScenarioKind::Others:
      if (rng.chance(0.6))
        objs.push_back(along_road(road, rng.uniform(25.0, 50.0), rng.uniform(-1.0, 1.0), rng.uniform(4.0, 4.8), 1.8,
                                  rng.uniform(2.0, 8.0), ObjectClass::Car, 0.5 * std::numbers::pi));
      if (rng.chance(0.5))
        objs.push_back(along_road(road, rng.uniform(15.0, 40.0), rng.sign() * rng.uniform(half - 0.2, half + 1.0), 0.5,
                                  0.5, rng.uniform(0.5, 1.5), ObjectClass::Pedestrian, rng.uniform(0.0, 6.28)));
      if (rng.chance(0.5))
        objs.push_back(along_road(road, rng.uniform(15.0, 45.0), rng.sign() * rng.uniform(half - 0.3, half), 0.4,
                                  0.4, 0.0, ObjectClass::Cone));
      break;
  }
  return objs;
}

OccupancyGrid make_grid(Rng& rng, const Road& road, const std::vector<TrackedObject>& objects) {
  OccupancyGrid g;
  g.resolution = 0.2;
  g.width = 300;
  g.height = 300;
  g.origin = {-30.0, -30.0};  // ego-centred 60 m square
  g.cells.assign(static_cast<std::size_t>(g.width) * g.height, 0);
  auto fill_box = [&](const TrackedObject& box) {
    const auto fp = footprint(box);
    const Polygon2 poly{{fp.begin(), fp.end()}, Frame::VehicleLeveled};
    const Bounds2 bb = bounding_box(poly.vertices);
    const int i0 = std::max(0, static_cast<int>(std::floor((bb.min.x - g.origin.x) / g.resolution)));
    const int j0 = std::max(0, static_cast<int>(std::floor((bb.min.y - g.origin.y) / g.resolution)));
    const int i1 = std::min(g.width - 1, static_cast<int>(std::floor((bb.max.x - g.origin.x) / g.resolution)));
    const int j1 = std::min(g.height - 1, static_cast<int>(std::floor((bb.max.y - g.origin.y) / g.resolution)));
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        if (point_in_polygon({g.origin.x + (i + 0.5) * g.resolution, g.origin.y + (j + 0.5) * g.resolution}, poly))
          g.cells[static_cast<std::size_t>(j) * g.width + i] = 1;
  };
  for (const TrackedObject& o : objects) fill_box(o);
  // Roadside clutter: poles, walls, parked trailers near either boundary.
  const int clutter = rng.integer(2, 7);
  for (int c = 0; c < clutter; ++c) {
    const double s = rng.uniform(8.0, 45.0);
    const double lateral = rng.sign() * (0.5 * road.width + rng.uniform(-0.6, 2.0));
    TrackedObject blob = along_road(road, s, lateral, rng.uniform(0.4, 3.0), rng.uniform(0.4, 1.2), 0.0,
                                    ObjectClass::Bollard);
    fill_box(blob);
  }
  return g;
}

struct Terrain {
  double base = 0.0;
  double grade1 = 0.0;
  double grade2 = 0.0;
  double knee = 1e9;
  double cross = 0.0;
  Point2 origin;
  Point2 dir;

  double altitude(Point2 p) const {
    const double a = (p.x - origin.x) * dir.x + (p.y - origin.y) * dir.y;
    const double c = -(p.x - origin.x) * dir.y + (p.y - origin.y) * dir.x;
    const double along = a < knee ? grade1 * a : grade1 * knee + grade2 * (a - knee);
    return base + along + cross * c;
  }
};

SynthFrame make_frame(const SynthOptions& opt, std::size_t index) {
  const ScenarioKind kind = opt.kinds[index % opt.kinds.size()];
  Rng rng(opt.seed, index);
  SynthFrame out{{}, kind};
  SceneFrame& sc = out.scene;
  sc.frame_id = "s" + std::to_string(opt.seed) + "_" + std::string(to_string(kind)) + "_" +
                std::string(5 - std::min<std::size_t>(5, std::to_string(index).size()), '0') + std::to_string(index);

  sc.intr = {500.0, 500.0, 320.0, 240.0, 640, 480};
  sc.mount = {{rng.uniform(1.3, 1.7), rng.uniform(-0.1, 0.1), rng.uniform(1.3, 1.5)},
              rng.uniform(-0.5, 0.5) * kDeg,
              rng.uniform(4.0, 8.0) * kDeg,
              rng.uniform(-1.0, 1.0) * kDeg};

  const Road road = make_road(rng, kind);
  sc.objects = make_objects(rng, kind, road);

  Terrain terrain;
  terrain.base = rng.uniform(0.0, 400.0);
  if (opt.terrain == TerrainKind::Ramp) {
    // Grades only ever increase with distance: no crests hiding the road.
    terrain.grade1 = rng.uniform(-0.09, 0.06);
    terrain.grade2 = std::min(terrain.grade1 + rng.uniform(0.0, 0.08), 0.09);
    terrain.knee = rng.uniform(15.0, 50.0);
    terrain.cross = rng.uniform(-0.03, 0.03);
  }
  const double yaw = rng.uniform(-std::numbers::pi, std::numbers::pi);
  const Point2 pos{rng.uniform(-5000.0, 5000.0), rng.uniform(-5000.0, 5000.0)};
  terrain.origin = pos;
  terrain.dir = {std::cos(yaw), std::sin(yaw)};
  const double max_tilt = opt.max_tilt_deg * kDeg;
  sc.ego.position = {pos.x, pos.y, terrain.altitude(pos)};
  sc.ego.yaw = yaw;
  sc.ego.pitch = -std::atan(terrain.grade1) + rng.uniform(-max_tilt, max_tilt);
  sc.ego.roll = std::atan(terrain.cross) + rng.uniform(-max_tilt, max_tilt);

  const double shift_scale = kind == ScenarioKind::NoMarkings ? 1.2 : 0.25;
  for (double s : {0.0, 40.0, 80.0, 120.0})
    sc.shift.knots.push_back({s, -rng.uniform(0.0, shift_scale), rng.uniform(0.0, shift_scale)});

  if (opt.obstacles) sc.grid = make_grid(rng, road, sc.objects);

  const double half = 0.5 * road.width;
  for (std::size_t i = 0; i < road.center.size(); ++i) {
    const double s = static_cast<double>(i) * kStep - kBehind;
    sc.bounds.left.vertices.push_back(leveled_vehicle_to_map(sc.ego, road.offset(s, half)));
    sc.bounds.right.vertices.push_back(leveled_vehicle_to_map(sc.ego, road.offset(s, -half)));
  }

  // Ground samples on a map-aligned 1 m lattice (cell centres) around the road.
  std::vector<Point2> all = sc.bounds.left.vertices;
  all.insert(all.end(), sc.bounds.right.vertices.begin(), sc.bounds.right.vertices.end());
  const Bounds2 bb = bounding_box(all);
  const int x0 = static_cast<int>(std::floor(bb.min.x)) - 10, x1 = static_cast<int>(std::ceil(bb.max.x)) + 10;
  const int y0 = static_cast<int>(std::floor(bb.min.y)) - 10, y1 = static_cast<int>(std::ceil(bb.max.y)) + 10;
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) {
      const Point2 p{x + 0.5, y + 0.5};
      sc.height.samples.push_back({p, terrain.altitude(p)});
    }
  return out;
}

}  // namespace

std::vector<SynthFrame> synthesize(const SynthOptions& options) {
  if (options.kinds.empty()) throw Error(ErrorKind::InvalidArgument, "no scenario kind given");
  if (options.count == 0) throw Error(ErrorKind::InvalidArgument, "count must be at least 1");
  std::vector<SynthFrame> frames(options.count);
  const auto n = static_cast<std::ptrdiff_t>(options.count);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t k = 0; k < n; ++k) frames[static_cast<std::size_t>(k)] = make_frame(options, static_cast<std::size_t>(k));
  return frames;
}

void write_synth(const std::vector<SynthFrame>& frames, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream manifest(out_dir / "manifest.csv");
  if (!manifest) throw Error(ErrorKind::IoError, "cannot write " + (out_dir / "manifest.csv").string());
  manifest << "frame_id,scenario\n";
  for (const SynthFrame& f : frames) {
    save_scene(f.scene, out_dir / (f.scene.frame_id + ".json"));
    manifest << f.scene.frame_id << ',' << to_string(f.kind) << '\n';
  }
}

}  // namespace egocorridor

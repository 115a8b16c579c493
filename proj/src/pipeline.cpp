#include "egocorridor/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "egocorridor/corridor.hpp"
#include "egocorridor/image_io.hpp"
#include "egocorridor/objects.hpp"
#include "egocorridor/occlusion.hpp"
#include "egocorridor/oracle.hpp"

namespace egocorridor {
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

TiltState effective_tilt(const SceneFrame& scene, const PipelineConfig& config) {
  return config.enable_tilt ? scene.tilt() : TiltState{};
}

/// Camera ground position in the leveled frame.
Point2 sensor_position(const SceneFrame& scene, const PipelineConfig& config) {
  const Eigen::Vector3d t = body_to_leveled(effective_tilt(scene, config)) * scene.extrinsics().translation;
  return {t.x(), t.y()};
}

Polygon3 lift(const Polygon2& poly, const SceneFrame& scene, const HeightMap* terrain, const PipelineConfig& config) {
  Polygon3 out;
  if (terrain == nullptr || !config.enable_elevation) {
    out.vertices.reserve(poly.vertices.size());
    for (Point2 p : poly.vertices) out.vertices.push_back({p.x, p.y, 0.0});
    return out;
  }
  const Polygon2 dense = densify(poly, config.densify_max_edge);
  const double ground = scene.ego.position.z;
  out.vertices.reserve(dense.vertices.size());
  for (Point2 p : dense.vertices) {
    const double z = query_height(*terrain, leveled_vehicle_to_map(scene.ego, p), ground) - ground;
    out.vertices.push_back({p.x, p.y, z});
  }
  return out;
}

}  // namespace

StageTimings& StageTimings::operator+=(const StageTimings& o) {
  corridor += o.corridor;
  objects += o.objects;
  occlusion += o.occlusion;
  elevation += o.elevation;
  projection += o.projection;
  raster += o.raster;
  return *this;
}

LeveledGeometry leveled_geometry(const SceneFrame& scene, const HeightMap* terrain, const PipelineConfig& config,
                                 StageTimings* timings) {
  StageTimings local;
  StageTimings& t = timings ? *timings : local;

  auto t0 = Clock::now();
  LaneBoundaries bounds = scene.bounds;
  if (config.enable_shift && !scene.shift.knots.empty()) {
    bounds.left = apply_lateral_shift(resample_polyline(bounds.left, config.resample_step),
                                      offsets_for(scene.shift, Side::Left));
    bounds.right = apply_lateral_shift(resample_polyline(bounds.right, config.resample_step),
                                       offsets_for(scene.shift, Side::Right));
  }
  const Corridor corridor = to_leveled_vehicle(build_corridor(bounds, config.resample_step, config.max_range), scene.ego);
  t.corridor += seconds_since(t0);

  t0 = Clock::now();
  const Point2 ego{0.0, 0.0};
  std::optional<Polygon2> cut = corridor.polygon;
  if (config.enable_objects && !scene.objects.empty()) {
    const auto relevant = filter_relevant(scene.objects, corridor.polygon);
    cut = apply_cutoffs(corridor, relevant, ego, config.ahead_angle_threshold * std::numbers::pi / 180.0);
  }
  t.objects += seconds_since(t0);

  LeveledGeometry geom;
  if (!cut) return geom;

  t0 = Clock::now();
  std::vector<Polygon2> hidden;
  if (config.enable_occlusion && scene.grid) {
    const CellWindow window = window_covering(*scene.grid, bounding_box(cut->vertices));
    const VisibilityGrid vis = visibility_from(*scene.grid, sensor_position(scene, config), window);
    hidden = occluded_polygons(vis, window);
  }
  t.occlusion += seconds_since(t0);

  t0 = Clock::now();
  geom.corridor = lift(*cut, scene, terrain, config);
  geom.occluded.reserve(hidden.size());
  for (const Polygon2& h : hidden) geom.occluded.push_back(lift(h, scene, terrain, config));
  t.elevation += seconds_since(t0);
  return geom;
}

Mask render_geometry(const LeveledGeometry& geom, const SceneFrame& scene, const PipelineConfig& config,
                     StageTimings* timings) {
  StageTimings local;
  StageTimings& t = timings ? *timings : local;

  auto t0 = Clock::now();
  const CameraExtrinsics extr = scene.extrinsics();
  const TiltState tilt = effective_tilt(scene, config);
  const ProjectionOptions opts{config.enable_tilt, config.z_near};
  std::vector<ImagePolygon> add, subtract;
  if (geom.corridor)
    if (auto img = project_polygon(*geom.corridor, extr, scene.intr, tilt, opts)) add.push_back(std::move(*img));
  for (const Polygon3& h : geom.occluded)
    if (auto img = project_polygon(h, extr, scene.intr, tilt, opts)) subtract.push_back(std::move(*img));
  t.projection += seconds_since(t0);

  t0 = Clock::now();
  Mask mask = rasterize_mask(add, subtract, scene.intr);
  t.raster += seconds_since(t0);
  return mask;
}

FrameResult label_frame(const SceneFrame& scene, const HeightMap* terrain, const PipelineConfig& config) {
  FrameResult r;
  const LeveledGeometry geom = leveled_geometry(scene, terrain, config, &r.timings);
  r.mask = render_geometry(geom, scene, config, &r.timings);
  return r;
}

std::optional<HeightMap> frame_height_map(const SceneFrame& scene, double resolution) {
  if (scene.height.samples.empty()) return std::nullopt;
  return build_height_map(scene.height.samples, resolution);
}

HeightMap stitch_height_map(const std::vector<SceneFrame>& scenes, double resolution) {
  std::vector<HeightSample> all;
  for (const SceneFrame& s : scenes) all.insert(all.end(), s.height.samples.begin(), s.height.samples.end());
  return build_height_map(all, resolution);
}

std::map<fs::path, HeightMap> load_map_files(const std::vector<SceneFrame>& scenes) {
  std::map<fs::path, HeightMap> maps;
  for (const SceneFrame& s : scenes)
    if (s.height.map_file && !maps.contains(*s.height.map_file))
      maps.emplace(*s.height.map_file, load_height_map(*s.height.map_file));
  return maps;
}

std::vector<SceneFrame> load_scene_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::IoError, "not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<SceneFrame> scenes;
  scenes.reserve(files.size());
  std::set<std::string> ids;
  for (const fs::path& f : files) {
    scenes.push_back(load_scene(f));
    if (!ids.insert(scenes.back().frame_id).second)
      throw Error(ErrorKind::SchemaError, f.string() + ": duplicate frame_id '" + scenes.back().frame_id + "'");
  }
  return scenes;
}

nlohmann::json report_to_json(const RunReport& r) {
  nlohmann::json failed = nlohmann::json::array();
  for (const FrameFailure& f : r.failed)
    failed.push_back({{"frame_id", f.frame_id}, {"kind", to_string(f.kind)}, {"message", f.message}});
  nlohmann::json masks = nlohmann::json::array();
  for (const fs::path& p : r.mask_paths) masks.push_back(p.string());
  return {{"processed", r.processed},
          {"failed", failed},
          {"wall_seconds", r.wall_seconds},
          {"stage_seconds",
           {{"corridor", r.stages.corridor},
            {"objects", r.stages.objects},
            {"occlusion", r.stages.occlusion},
            {"elevation", r.stages.elevation},
            {"projection", r.stages.projection},
            {"raster", r.stages.raster}}},
          {"masks", masks}};
}

namespace {

enum class Renderer { Pipeline, Oracle };

RunReport run(const std::vector<SceneFrame>& scenes, const PipelineConfig& config, const fs::path& out_dir,
              const RunOptions& options, Renderer renderer) {
  validate(config);
  const auto start = Clock::now();
  fs::create_directories(out_dir);

  // Shared, read-only inputs are prepared before any worker starts.
  const auto map_files = load_map_files(scenes);
  if (options.save_height_map) save_height_map(stitch_height_map(scenes, config.height_resolution), *options.save_height_map);

  const auto n = static_cast<std::ptrdiff_t>(scenes.size());
  std::vector<std::optional<FrameFailure>> failures(scenes.size());
  std::vector<StageTimings> timings(scenes.size());
  const int workers = std::max(options.workers, 1);

#pragma omp parallel for num_threads(workers) schedule(dynamic, 1)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const SceneFrame& scene = scenes[static_cast<std::size_t>(k)];
    try {
      // Inline samples describe this frame only, so its map is built here.
      std::optional<HeightMap> own;
      const HeightMap* terrain = nullptr;
      if (config.enable_elevation) {
        auto t0 = Clock::now();
        if (scene.height.map_file) {
          terrain = &map_files.at(*scene.height.map_file);
        } else if ((own = frame_height_map(scene, config.height_resolution))) {
          terrain = &*own;
        }
        timings[static_cast<std::size_t>(k)].elevation += seconds_since(t0);
      }
      Mask mask;
      if (renderer == Renderer::Pipeline) {
        FrameResult r = label_frame(scene, terrain, config);
        timings[static_cast<std::size_t>(k)] += r.timings;
        mask = std::move(r.mask);
      } else {
        mask = render_reference(scene, terrain, config);
      }
      write_pgm(mask, out_dir / (scene.frame_id + ".pgm"));
      if (options.png) write_mask_png(mask, out_dir / (scene.frame_id + ".png"));
    } catch (const Error& e) {
      failures[static_cast<std::size_t>(k)] = FrameFailure{scene.frame_id, e.kind(), e.what()};
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(k)] = FrameFailure{scene.frame_id, ErrorKind::IoError, e.what()};
    }
  }

  RunReport report;
  for (std::size_t k = 0; k < scenes.size(); ++k) {
    report.stages += timings[k];
    if (failures[k]) {
      report.failed.push_back(*failures[k]);
    } else {
      ++report.processed;
      report.mask_paths.push_back(out_dir / (scenes[k].frame_id + ".pgm"));
    }
  }
  report.wall_seconds = seconds_since(start);
  return report;
}

}  // namespace

RunReport generate(const std::vector<SceneFrame>& scenes, const PipelineConfig& config, const fs::path& out_dir,
                   const RunOptions& options) {
  return run(scenes, config, out_dir, options, Renderer::Pipeline);
}

RunReport generate(const fs::path& scene_dir, const PipelineConfig& config, const fs::path& out_dir,
                   const RunOptions& options) {
  return generate(load_scene_dir(scene_dir), config, out_dir, options);
}

RunReport run_oracle(const std::vector<SceneFrame>& scenes, const PipelineConfig& config, const fs::path& out_dir,
                     const RunOptions& options) {
  return run(scenes, config, out_dir, options, Renderer::Oracle);
}

RunReport run_oracle(const fs::path& scene_dir, const PipelineConfig& config, const fs::path& out_dir,
                     const RunOptions& options) {
  return run_oracle(load_scene_dir(scene_dir), config, out_dir, options);
}

std::map<std::string, std::string> load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open manifest " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw Error(ErrorKind::SchemaError, path.string() + ":" + std::to_string(lineno) + ": expected frame_id,scenario");
    const std::string id = line.substr(0, comma), scenario = line.substr(comma + 1);
    if (lineno == 1 && id == "frame_id") continue;
    out[id] = scenario;
  }
  return out;
}

namespace {

std::map<std::string, fs::path> masks_in(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::IoError, "not a directory: " + dir.string());
  std::map<std::string, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") out[entry.path().stem().string()] = entry.path();
  return out;
}

}  // namespace

EvaluationResult evaluate(const fs::path& dir_a, const fs::path& dir_b, const EvaluationOptions& options) {
  if (options.batch_size == 0) throw Error(ErrorKind::InvalidArgument, "batch size must be at least 1");
  const auto a = masks_in(dir_a);
  const auto b = masks_in(dir_b);
  const auto manifest = options.manifest ? load_manifest(*options.manifest) : std::map<std::string, std::string>{};

  EvaluationResult result;
  std::map<std::string, std::vector<std::string>> groups;  // scenario -> frame ids, sorted
  for (const auto& [id, path] : a) {
    if (!b.contains(id)) {
      result.skipped.push_back(id);
      continue;
    }
    const auto it = manifest.find(id);
    groups[options.manifest ? (it == manifest.end() ? "unlisted" : it->second) : "all"].push_back(id);
  }
  for (const auto& [id, path] : b)
    if (!a.contains(id)) result.skipped.push_back(id);
  std::sort(result.skipped.begin(), result.skipped.end());
  if (groups.empty()) throw Error(ErrorKind::EmptyEvaluation, "no frame_id appears in both directories");

  std::mt19937_64 rng(options.seed.value_or(0));
  for (auto& [scenario, ids] : groups) {
    if (options.seed) std::shuffle(ids.begin(), ids.end(), rng);
    std::vector<PairScore> scores(ids.size());
    std::vector<std::exception_ptr> errors(ids.size());
    const auto n = static_cast<std::ptrdiff_t>(ids.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      const auto i = static_cast<std::size_t>(k);
      try {
        const OverlapCounts c = overlap_serial(read_mask(a.at(ids[i])), read_mask(b.at(ids[i])));
        scores[i] = {dice(c), jaccard(c)};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
    const BatchReport rep = batch_report(scores, options.batch_size);
    result.rows.push_back(make_scenario_batch(scenario, rep.batches.size(), rep.dice, rep.jaccard));
    result.pairs += ids.size();
  }
  return result;
}

}  // namespace egocorridor

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "egocorridor/elevation.hpp"
#include "egocorridor/error.hpp"
#include "egocorridor/metrics.hpp"
#include "egocorridor/pipeline_config.hpp"
#include "egocorridor/projection.hpp"
#include "egocorridor/scene.hpp"

namespace egocorridor {

/// Seconds spent per stage, summed over frames for a run.
struct StageTimings {
  double corridor = 0.0;   // resampling, shift, ring construction
  double objects = 0.0;
  double occlusion = 0.0;
  double elevation = 0.0;
  double projection = 0.0;
  double raster = 0.0;

  StageTimings& operator+=(const StageTimings& o);
  double total() const { return corridor + objects + occlusion + elevation + projection + raster; }
};

/// Corridor and occluded cells in the vehicle-leveled frame, lifted onto the
/// terrain and ready for projection.
struct LeveledGeometry {
  std::optional<Polygon3> corridor;  // nullopt when objects cut it away completely
  std::vector<Polygon3> occluded;
};

/// Stages one to five. `terrain` may be null (flat world).
LeveledGeometry leveled_geometry(const SceneFrame& scene, const HeightMap* terrain, const PipelineConfig& config,
                                 StageTimings* timings = nullptr);

/// Projects and rasterizes leveled geometry with the scene's camera.
Mask render_geometry(const LeveledGeometry& geom, const SceneFrame& scene, const PipelineConfig& config,
                     StageTimings* timings = nullptr);

struct FrameResult {
  Mask mask;
  StageTimings timings;
};

FrameResult label_frame(const SceneFrame& scene, const HeightMap* terrain, const PipelineConfig& config);

/// Height map built from the frame's inline samples, or nullopt if it has none.
std::optional<HeightMap> frame_height_map(const SceneFrame& scene, double resolution);

/// All frames' inline samples in one map (route-level stitching).
HeightMap stitch_height_map(const std::vector<SceneFrame>& scenes, double resolution);

/// Persisted height maps referenced by the scenes, each loaded once.
std::map<std::filesystem::path, HeightMap> load_map_files(const std::vector<SceneFrame>& scenes);

/// Every *.json file of the directory, ordered by file name. Any schema
/// violation aborts with SchemaError before a frame is processed.
std::vector<SceneFrame> load_scene_dir(const std::filesystem::path& dir);

struct FrameFailure {
  std::string frame_id;
  ErrorKind kind;
  std::string message;
};

struct RunReport {
  std::size_t processed = 0;
  std::vector<FrameFailure> failed;
  double wall_seconds = 0.0;
  StageTimings stages;
  std::vector<std::filesystem::path> mask_paths;
};

nlohmann::json report_to_json(const RunReport& report);

struct RunOptions {
  int workers = 1;
  bool png = false;  // also write <frame_id>.png
  std::optional<std::filesystem::path> save_height_map;
};

/// Labels every scene, writing <frame_id>.pgm into out_dir. Per-frame errors
/// are recorded in the report.
RunReport generate(const std::vector<SceneFrame>& scenes, const PipelineConfig& config,
                   const std::filesystem::path& out_dir, const RunOptions& options = {});
RunReport generate(const std::filesystem::path& scene_dir, const PipelineConfig& config,
                   const std::filesystem::path& out_dir, const RunOptions& options = {});

/// Same as generate, with the brute-force reference renderer.
RunReport run_oracle(const std::vector<SceneFrame>& scenes, const PipelineConfig& config,
                     const std::filesystem::path& out_dir, const RunOptions& options = {});
RunReport run_oracle(const std::filesystem::path& scene_dir, const PipelineConfig& config,
                     const std::filesystem::path& out_dir, const RunOptions& options = {});

/// frame_id -> scenario, from a `frame_id,scenario` CSV (header optional).
std::map<std::string, std::string> load_manifest(const std::filesystem::path& path);

struct EvaluationOptions {
  std::size_t batch_size = 25;
  std::optional<std::filesystem::path> manifest;
  std::optional<std::uint64_t> seed;  // shuffles pairs inside each scenario
};

struct EvaluationResult {
  std::vector<ScenarioBatch> rows;
  std::vector<std::string> skipped;  // frame_ids present in only one directory
  std::size_t pairs = 0;
};

/// Pairs <frame_id>.pgm masks of both directories and scores them per
/// scenario. Without a manifest every pair belongs to scenario "all"; frames
/// missing from the manifest go to "unlisted". Throws EmptyEvaluation when
/// nothing pairs up.
EvaluationResult evaluate(const std::filesystem::path& dir_a, const std::filesystem::path& dir_b,
                          const EvaluationOptions& options = {});

}  // namespace egocorridor

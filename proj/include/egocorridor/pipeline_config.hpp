#pragma once

#include <filesystem>

#include <nlohmann/json_fwd.hpp>

namespace egocorridor {

struct PipelineConfig {
  double resample_step = 0.5;          // m
  double max_range = 100.0;            // m
  double ahead_angle_threshold = 45.0;  // deg
  double height_resolution = 1.0;      // m
  double densify_max_edge = 1.0;       // m, before lifting to 3D
  double z_near = 0.1;                 // m
  double grid_resolution = 0.2;        // m, synthetic costmaps
  double grid_extent = 60.0;           // m, ego-centred square

  bool enable_shift = true;
  bool enable_objects = true;
  bool enable_occlusion = true;
  bool enable_elevation = true;
  bool enable_tilt = true;
};

/// Throws InvalidArgument when a numeric field is not positive or the
/// threshold is outside (0, 90) degrees.
void validate(const PipelineConfig& config);

PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& config);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace egocorridor

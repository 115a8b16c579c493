#include "egocorridor/pipeline_config.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "egocorridor/error.hpp"

namespace egocorridor {

void validate(const PipelineConfig& c) {
  auto positive = [](double v, const char* name) {
    if (!(std::isfinite(v) && v > 0.0)) throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be positive");
  };
  positive(c.resample_step, "resample_step");
  positive(c.max_range, "max_range");
  positive(c.height_resolution, "height_resolution");
  positive(c.densify_max_edge, "densify_max_edge");
  positive(c.z_near, "z_near");
  positive(c.grid_resolution, "grid_resolution");
  positive(c.grid_extent, "grid_extent");
  if (!(c.ahead_angle_threshold > 0.0 && c.ahead_angle_threshold < 90.0))
    throw Error(ErrorKind::InvalidArgument, "ahead_angle_threshold must lie in (0, 90) degrees");
}

PipelineConfig config_from_json(const nlohmann::json& j) {
  PipelineConfig c;
  if (!j.is_object()) throw Error(ErrorKind::SchemaError, "config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "resample_step") c.resample_step = value.get<double>();
      else if (key == "max_range") c.max_range = value.get<double>();
      else if (key == "ahead_angle_threshold") c.ahead_angle_threshold = value.get<double>();
      else if (key == "height_resolution") c.height_resolution = value.get<double>();
      else if (key == "densify_max_edge") c.densify_max_edge = value.get<double>();
      else if (key == "z_near") c.z_near = value.get<double>();
      else if (key == "grid_resolution") c.grid_resolution = value.get<double>();
      else if (key == "grid_extent") c.grid_extent = value.get<double>();
      else if (key == "enable_shift") c.enable_shift = value.get<bool>();
      else if (key == "enable_objects") c.enable_objects = value.get<bool>();
      else if (key == "enable_occlusion") c.enable_occlusion = value.get<bool>();
      else if (key == "enable_elevation") c.enable_elevation = value.get<bool>();
      else if (key == "enable_tilt") c.enable_tilt = value.get<bool>();
      else throw Error(ErrorKind::SchemaError, "unknown config field '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

nlohmann::json config_to_json(const PipelineConfig& c) {
  return {{"resample_step", c.resample_step},
          {"max_range", c.max_range},
          {"ahead_angle_threshold", c.ahead_angle_threshold},
          {"height_resolution", c.height_resolution},
          {"densify_max_edge", c.densify_max_edge},
          {"z_near", c.z_near},
          {"grid_resolution", c.grid_resolution},
          {"grid_extent", c.grid_extent},
          {"enable_shift", c.enable_shift},
          {"enable_objects", c.enable_objects},
          {"enable_occlusion", c.enable_occlusion},
          {"enable_elevation", c.enable_elevation},
          {"enable_tilt", c.enable_tilt}};
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaError, path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace egocorridor

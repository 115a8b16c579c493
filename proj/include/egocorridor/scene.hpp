#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "egocorridor/corridor.hpp"
#include "egocorridor/elevation.hpp"
#include "egocorridor/objects.hpp"
#include "egocorridor/occlusion.hpp"
#include "egocorridor/projection.hpp"

namespace egocorridor {

/// Camera mounting as stored in the scene file (body frame, Z-Y-X angles).
struct CameraMount {
  Point3 position;
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  CameraExtrinsics extrinsics() const { return CameraExtrinsics::from_mount(position, roll, pitch, yaw); }
};

/// Inline altitude samples or a reference to a persisted height map.
struct HeightSource {
  std::vector<HeightSample> samples;
  std::optional<std::filesystem::path> map_file;
};

/// Everything needed to label one camera image. Map-frame geometry except the
/// occupancy grid and the objects, which are in the vehicle-leveled frame.
struct SceneFrame {
  std::string frame_id;
  CameraIntrinsics intr;
  CameraMount mount;
  Pose ego;
  LaneBoundaries bounds;
  LateralShiftProfile shift;
  std::vector<TrackedObject> objects;
  std::optional<OccupancyGrid> grid;
  HeightSource height;

  CameraExtrinsics extrinsics() const { return mount.extrinsics(); }
  TiltState tilt() const { return {ego.roll, ego.pitch}; }
};

/// Row-major bitset, least significant bit first, base64 encoded.
std::string encode_cells(const std::vector<std::uint8_t>& cells);
std::vector<std::uint8_t> decode_cells(const std::string& text, std::size_t count);

/// Parses and validates a scene document. Unknown fields, missing required
/// fields and out-of-range values raise SchemaError. Relative map_file paths
/// are resolved against `base_dir`.
SceneFrame scene_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json scene_to_json(const SceneFrame& scene);

SceneFrame load_scene(const std::filesystem::path& path);
void save_scene(const SceneFrame& scene, const std::filesystem::path& path);

}  // namespace egocorridor

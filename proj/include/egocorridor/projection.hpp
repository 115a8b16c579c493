#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "egocorridor/geometry.hpp"

namespace egocorridor {

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;
};

bool is_valid(const CameraIntrinsics& intr);

/// Camera optical frame (X right, Y down, Z forward) relative to the vehicle
/// body frame: p_body = rotation * p_optical + translation.
struct CameraExtrinsics {
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();

  /// Builds the extrinsics from a mounting position and a roll/pitch/yaw
  /// (Z-Y-X) mount rotation. Zero angles mean the optical axis looks along
  /// body x; positive pitch tilts it toward the ground.
  static CameraExtrinsics from_mount(Point3 position, double roll, double pitch, double yaw);
};

bool is_valid(const CameraExtrinsics& extr);

/// Measured body roll/pitch, right-handed about vehicle x and y.
struct TiltState {
  double roll = 0.0;
  double pitch = 0.0;
};

/// Rotation taking body-frame coordinates to the vehicle-leveled frame,
/// Rx(roll) * Ry(pitch). compensate_tilt applies its transpose.
Eigen::Matrix3d body_to_leveled(const TiltState& tilt);

/// p_body = Ry(pitch)^T * Rx(roll)^T * p_leveled.
Point3 compensate_tilt(Point3 p_leveled, const TiltState& tilt);

struct ImagePoint {
  double u = 0.0;
  double v = 0.0;
};
using ImagePolygon = std::vector<ImagePoint>;

inline constexpr double kDefaultZNear = 0.1;

/// Pinhole projection of an optical-frame point; throws BehindCamera when z <= z_near.
ImagePoint project_point(const CameraIntrinsics& intr, Point3 p_cam, double z_near = kDefaultZNear);

/// Sutherland-Hodgman against the plane z = z_near, keeping z >= z_near.
std::optional<Polygon3> clip_near_plane(const Polygon3& poly_cam, double z_near);

struct ProjectionOptions {
  bool compensate_tilt = true;
  double z_near = kDefaultZNear;
};

/// Vehicle-leveled point -> optical frame (tilt compensation, inverse extrinsics).
Point3 leveled_to_optical(Point3 p, const CameraExtrinsics& extr, const TiltState& tilt, bool compensate);

/// Leveled polygon -> image polygon, or nullopt if nothing lies in front of the near plane.
std::optional<ImagePolygon> project_polygon(const Polygon3& poly, const CameraExtrinsics& extr,
                                            const CameraIntrinsics& intr, const TiltState& tilt,
                                            const ProjectionOptions& opts = {});

/// Row-major binary raster, 1 = corridor.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  Mask() = default;
  Mask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }
  std::size_t count() const;
  friend bool operator==(const Mask&, const Mask&) = default;
};

/// Pixel (x, y) is set iff its centre (x + 0.5, y + 0.5) lies inside some
/// `add` polygon and inside no `subtract` polygon (even-odd per polygon).
/// Scanline fill, parallel over rows.
Mask rasterize_mask(std::span<const ImagePolygon> add, std::span<const ImagePolygon> subtract,
                    const CameraIntrinsics& intr);

/// Per-pixel crossing-test reference of rasterize_mask. Bit-identical output.
Mask rasterize_mask_serial(std::span<const ImagePolygon> add, std::span<const ImagePolygon> subtract,
                           const CameraIntrinsics& intr);

}  // namespace egocorridor

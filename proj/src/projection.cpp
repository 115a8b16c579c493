#include "egocorridor/projection.hpp"

#include <cmath>

#include <Eigen/Geometry>

#include "egocorridor/error.hpp"

namespace egocorridor {

bool is_valid(const CameraIntrinsics& intr) {
  return intr.fx > 0.0 && intr.fy > 0.0 && intr.width > 0 && intr.height > 0 && intr.cx >= 0.0 &&
         intr.cx < intr.width && intr.cy >= 0.0 && intr.cy < intr.height;
}

CameraExtrinsics CameraExtrinsics::from_mount(Point3 position, double roll, double pitch, double yaw) {
  const Eigen::Matrix3d mount = (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) *
                                 Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
                                 Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()))
                                    .toRotationMatrix();
  // Columns: optical X (right), Y (down), Z (forward) in body coordinates.
  Eigen::Matrix3d optical_in_body;
  optical_in_body << 0, 0, 1,
                     -1, 0, 0,
                     0, -1, 0;
  CameraExtrinsics e;
  e.translation = {position.x, position.y, position.z};
  e.rotation = mount * optical_in_body;
  return e;
}

bool is_valid(const CameraExtrinsics& extr) {
  const Eigen::Matrix3d& r = extr.rotation;
  return extr.translation.allFinite() && r.allFinite() &&
         (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= 1e-9 &&
         std::abs(r.determinant() - 1.0) <= 1e-9;
}

Eigen::Matrix3d body_to_leveled(const TiltState& tilt) {
  const double cr = std::cos(tilt.roll), sr = std::sin(tilt.roll);
  const double cp = std::cos(tilt.pitch), sp = std::sin(tilt.pitch);
  Eigen::Matrix3d rx;
  rx << 1, 0, 0,
        0, cr, -sr,
        0, sr, cr;
  Eigen::Matrix3d ry;
  ry << cp, 0, sp,
        0, 1, 0,
        -sp, 0, cp;
  return rx * ry;
}

Point3 compensate_tilt(Point3 p, const TiltState& tilt) {
  const Eigen::Vector3d b = body_to_leveled(tilt).transpose() * Eigen::Vector3d(p.x, p.y, p.z);
  return {b.x(), b.y(), b.z()};
}

ImagePoint project_point(const CameraIntrinsics& intr, Point3 p, double z_near) {
  if (!(p.z >= z_near)) throw Error(ErrorKind::BehindCamera, "point lies behind the near plane");
  return {intr.cx + intr.fx * p.x / p.z, intr.cy + intr.fy * p.y / p.z};
}

std::optional<Polygon3> clip_near_plane(const Polygon3& poly, double z_near) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  Polygon3 out;
  out.vertices.reserve(n + 2);
  auto crossing = [&](Point3 a, Point3 b) {
    const double t = (z_near - a.z) / (b.z - a.z);
    Point3 p = a + t * (b - a);
    p.z = z_near;
    return p;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const Point3 prev = v[(i + n - 1) % n];
    const Point3 cur = v[i];
    const bool in_p = prev.z >= z_near;
    const bool in_c = cur.z >= z_near;
    if (in_c) {
      if (!in_p) out.vertices.push_back(crossing(prev, cur));
      out.vertices.push_back(cur);
    } else if (in_p) {
      out.vertices.push_back(crossing(prev, cur));
    }
  }
  if (out.vertices.size() < 3) return std::nullopt;
  return out;
}

Point3 leveled_to_optical(Point3 p, const CameraExtrinsics& extr, const TiltState& tilt, bool compensate) {
  const Point3 body = compensate ? compensate_tilt(p, tilt) : p;
  const Eigen::Vector3d o = extr.rotation.transpose() * (Eigen::Vector3d(body.x, body.y, body.z) - extr.translation);
  return {o.x(), o.y(), o.z()};
}

std::optional<ImagePolygon> project_polygon(const Polygon3& poly, const CameraExtrinsics& extr,
                                            const CameraIntrinsics& intr, const TiltState& tilt,
                                            const ProjectionOptions& opts) {
  Polygon3 cam;
  cam.vertices.reserve(poly.vertices.size());
  for (const Point3& p : poly.vertices) cam.vertices.push_back(leveled_to_optical(p, extr, tilt, opts.compensate_tilt));
  const auto clipped = clip_near_plane(cam, opts.z_near);
  if (!clipped) return std::nullopt;
  ImagePolygon img;
  img.reserve(clipped->vertices.size());
  for (const Point3& p : clipped->vertices) img.push_back(project_point(intr, p, opts.z_near));
  return img;
}

std::size_t Mask::count() const {
  std::size_t n = 0;
  for (std::uint8_t b : bits) n += b != 0;
  return n;
}

}  // namespace egocorridor

#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace egocorridor {

/// Coordinate conventions: vehicle x forward, y left, z up; map frame z up.
enum class Frame { Map, VehicleLeveled };

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2, Point2) = default;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Point3 operator+(Point3 a, Point3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Point3 operator-(Point3 a, Point3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Point3 operator*(double s, Point3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(Point3, Point3) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline Point2 lerp(Point2 a, Point2 b, double t) { return a + t * (b - a); }
inline Point2 left_normal(Point2 unit_dir) { return {-unit_dir.y, unit_dir.x}; }
inline Point2 xy(Point3 p) { return {p.x, p.y}; }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }
inline bool is_finite(Point3 p) { return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z); }

/// Wraps an angle into (-pi, pi].
double normalize_angle(double rad);

/// Map-frame pose of the ego vehicle. position.z is the ground altitude below
/// the vehicle reference point.
struct Pose {
  Point3 position;
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

struct Polyline2 {
  std::vector<Point2> vertices;
  Frame frame = Frame::Map;
};

/// Counter-clockwise ring, implicitly closed.
struct Polygon2 {
  std::vector<Point2> vertices;
  Frame frame = Frame::Map;
};

struct Polygon3 {
  std::vector<Point3> vertices;
};

/// Closed half-plane {p : (p - anchor) . inward_normal >= 0}.
struct HalfPlane {
  Point2 anchor;
  Point2 inward_normal;

  double signed_distance(Point2 p) const { return dot(p - anchor, inward_normal); }
  bool contains(Point2 p, double tol = 0.0) const { return signed_distance(p) >= -tol; }
};

inline constexpr double kVertexEpsilon = 1e-9;

// Polyline ---------------------------------------------------------------

double polyline_length(std::span<const Point2> vertices);

/// True when the polyline has >= 2 finite vertices and no repeated consecutive vertex.
bool is_valid(const Polyline2& line);

/// Samples the polyline at arc-length multiples of `step` plus both endpoints.
/// A line shorter than `step` yields its two endpoints only.
Polyline2 resample_polyline(const Polyline2& line, double step);

/// Cuts the polyline at arc length `max_length` (inserting the interpolated endpoint).
Polyline2 truncate_polyline(const Polyline2& line, double max_length);

/// Inserts vertices so that no edge of the closed ring is longer than `max_edge`.
Polygon2 densify(const Polygon2& poly, double max_edge);

// Polygon ----------------------------------------------------------------

/// Shoelace signed area; positive for counter-clockwise rings.
double signed_area(std::span<const Point2> ring);
double polygon_area(const Polygon2& poly);

/// Closed segment intersection test (touching counts).
bool segments_intersect(Point2 a0, Point2 a1, Point2 b0, Point2 b1);

/// True when no two non-adjacent edges of the ring intersect.
bool is_simple(std::span<const Point2> ring);

/// >= 3 finite vertices, simple, counter-clockwise.
bool is_valid(const Polygon2& poly);

/// Closed membership: points on the boundary are inside.
bool point_in_polygon(Point2 p, const Polygon2& poly);

/// Sutherland-Hodgman against a single line. Returns nullopt when nothing of
/// the polygon lies on the kept side.
std::optional<Polygon2> clip_polygon_halfplane(const Polygon2& poly, const HalfPlane& hp);

struct Bounds2 {
  Point2 min;
  Point2 max;
};
Bounds2 bounding_box(std::span<const Point2> pts);

// Frames -----------------------------------------------------------------

/// Map frame -> vehicle-leveled frame: translate by -position, rotate by -yaw.
Point3 map_to_leveled_vehicle(const Pose& pose, Point3 p);
Point3 leveled_vehicle_to_map(const Pose& pose, Point3 p);
Point2 map_to_leveled_vehicle(const Pose& pose, Point2 p);
Point2 leveled_vehicle_to_map(const Pose& pose, Point2 p);

}  // namespace egocorridor

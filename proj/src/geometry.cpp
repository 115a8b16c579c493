#include "egocorridor/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace egocorridor {

double normalize_angle(double rad) {
  double a = std::remainder(rad, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

double polyline_length(std::span<const Point2> vertices) {
  double total = 0.0;
  for (std::size_t i = 1; i < vertices.size(); ++i) total += distance(vertices[i - 1], vertices[i]);
  return total;
}

bool is_valid(const Polyline2& line) {
  if (line.vertices.size() < 2) return false;
  for (std::size_t i = 0; i < line.vertices.size(); ++i) {
    if (!is_finite(line.vertices[i])) return false;
    if (i > 0 && distance(line.vertices[i - 1], line.vertices[i]) <= kVertexEpsilon) return false;
  }
  return true;
}

Polyline2 resample_polyline(const Polyline2& line, double step) {
  const auto& v = line.vertices;
  Polyline2 out{{}, line.frame};
  if (v.empty()) return out;
  const double total = polyline_length(v);
  out.vertices.push_back(v.front());
  if (total < step) {
    if (v.size() > 1) out.vertices.push_back(v.back());
    return out;
  }

  std::size_t k = 1;
  double seg_start = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double len = distance(v[i - 1], v[i]);
    const double seg_end = seg_start + len;
    for (double s = static_cast<double>(k) * step; s <= seg_end && s < total - kVertexEpsilon;
         s = static_cast<double>(++k) * step) {
      const double t = len > 0.0 ? (s - seg_start) / len : 0.0;
      out.vertices.push_back(lerp(v[i - 1], v[i], std::clamp(t, 0.0, 1.0)));
    }
    seg_start = seg_end;
  }
  out.vertices.push_back(v.back());
  return out;
}

Polyline2 truncate_polyline(const Polyline2& line, double max_length) {
  const auto& v = line.vertices;
  Polyline2 out{{}, line.frame};
  if (v.empty()) return out;
  out.vertices.push_back(v.front());
  double acc = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double len = distance(v[i - 1], v[i]);
    if (acc + len >= max_length - kVertexEpsilon) {
      const double t = len > 0.0 ? (max_length - acc) / len : 0.0;
      const Point2 end = lerp(v[i - 1], v[i], std::clamp(t, 0.0, 1.0));
      if (distance(end, out.vertices.back()) > kVertexEpsilon) out.vertices.push_back(end);
      return out;
    }
    out.vertices.push_back(v[i]);
    acc += len;
  }
  return out;
}

Polygon2 densify(const Polygon2& poly, double max_edge) {
  Polygon2 out{{}, poly.frame};
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  out.vertices.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = v[i];
    const Point2 b = v[(i + 1) % n];
    out.vertices.push_back(a);
    const int pieces = static_cast<int>(std::ceil(distance(a, b) / max_edge));
    for (int k = 1; k < pieces; ++k) out.vertices.push_back(lerp(a, b, static_cast<double>(k) / pieces));
  }
  return out;
}

double signed_area(std::span<const Point2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) twice += cross(ring[i], ring[(i + 1) % n]);
  return 0.5 * twice;
}

double polygon_area(const Polygon2& poly) { return std::abs(signed_area(poly.vertices)); }

namespace {

int orientation(Point2 a, Point2 b, Point2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Point2 a, Point2 b, Point2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

}  // namespace

bool segments_intersect(Point2 a0, Point2 a1, Point2 b0, Point2 b1) {
  const int o1 = orientation(a0, a1, b0);
  const int o2 = orientation(a0, a1, b1);
  const int o3 = orientation(b0, b1, a0);
  const int o4 = orientation(b0, b1, a1);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a0, a1, b0)) return true;
  if (o2 == 0 && on_segment(a0, a1, b1)) return true;
  if (o3 == 0 && on_segment(b0, b1, a0)) return true;
  if (o4 == 0 && on_segment(b0, b1, a1)) return true;
  return false;
}

bool is_simple(std::span<const Point2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  // Per-edge boxes make the quadratic scan cheap for corridor-sized rings.
  std::vector<Bounds2> boxes(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = ring[i];
    const Point2 b = ring[(i + 1) % n];
    boxes[i] = {{std::min(a.x, b.x), std::min(a.y, b.y)}, {std::max(a.x, b.x), std::max(a.y, b.y)}};
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closing vertex
      const Bounds2& bi = boxes[i];
      const Bounds2& bj = boxes[j];
      if (bi.max.x < bj.min.x || bj.max.x < bi.min.x || bi.max.y < bj.min.y || bj.max.y < bi.min.y) continue;
      if (segments_intersect(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool is_valid(const Polygon2& poly) {
  if (poly.vertices.size() < 3) return false;
  for (const Point2& p : poly.vertices)
    if (!is_finite(p)) return false;
  return signed_area(poly.vertices) > 0.0 && is_simple(poly.vertices);
}

bool point_in_polygon(Point2 p, const Polygon2& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (point_segment_distance(p, v[j], v[i]) <= kVertexEpsilon) return true;
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      const double x = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

std::optional<Polygon2> clip_polygon_halfplane(const Polygon2& poly, const HalfPlane& hp) {
  constexpr double kSideTolerance = 1e-12;
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  std::vector<Point2> out;
  out.reserve(n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 prev = v[(i + n - 1) % n];
    const Point2 cur = v[i];
    const double dp = hp.signed_distance(prev);
    const double dc = hp.signed_distance(cur);
    const bool in_p = dp >= -kSideTolerance;
    const bool in_c = dc >= -kSideTolerance;
    if (in_c) {
      if (!in_p) out.push_back(lerp(prev, cur, dp / (dp - dc)));
      out.push_back(cur);
    } else if (in_p) {
      out.push_back(lerp(prev, cur, dp / (dp - dc)));
    }
  }

  std::vector<Point2> pruned;
  pruned.reserve(out.size());
  for (const Point2& p : out)
    if (pruned.empty() || distance(pruned.back(), p) >= kVertexEpsilon) pruned.push_back(p);
  while (pruned.size() > 1 && distance(pruned.front(), pruned.back()) < kVertexEpsilon) pruned.pop_back();

  if (pruned.size() < 3 || std::abs(signed_area(pruned)) <= kVertexEpsilon * kVertexEpsilon) return std::nullopt;
  return Polygon2{std::move(pruned), poly.frame};
}

Bounds2 bounding_box(std::span<const Point2> pts) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Bounds2 b{{inf, inf}, {-inf, -inf}};
  for (const Point2& p : pts) {
    b.min.x = std::min(b.min.x, p.x);
    b.min.y = std::min(b.min.y, p.y);
    b.max.x = std::max(b.max.x, p.x);
    b.max.y = std::max(b.max.y, p.y);
  }
  return b;
}

Point3 map_to_leveled_vehicle(const Pose& pose, Point3 p) {
  const double c = std::cos(pose.yaw);
  const double s = std::sin(pose.yaw);
  const Point3 d = p - pose.position;
  return {c * d.x + s * d.y, -s * d.x + c * d.y, d.z};
}

Point3 leveled_vehicle_to_map(const Pose& pose, Point3 p) {
  const double c = std::cos(pose.yaw);
  const double s = std::sin(pose.yaw);
  return Point3{c * p.x - s * p.y, s * p.x + c * p.y, p.z} + pose.position;
}

Point2 map_to_leveled_vehicle(const Pose& pose, Point2 p) {
  return xy(map_to_leveled_vehicle(pose, Point3{p.x, p.y, pose.position.z}));
}

Point2 leveled_vehicle_to_map(const Pose& pose, Point2 p) {
  return xy(leveled_vehicle_to_map(pose, Point3{p.x, p.y, 0.0}));
}

}  // namespace egocorridor

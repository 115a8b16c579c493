#include "egocorridor/objects.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <numeric>

namespace egocorridor {

std::string_view to_string(ObjectClass c) noexcept {
  switch (c) {
    case ObjectClass::Car: return "car";
    case ObjectClass::Truck: return "truck";
    case ObjectClass::Motorcycle: return "motorcycle";
    case ObjectClass::Pedestrian: return "pedestrian";
    case ObjectClass::Cyclist: return "cyclist";
    case ObjectClass::Cone: return "cone";
    case ObjectClass::Bollard: return "bollard";
  }
  return "car";
}

std::optional<ObjectClass> object_class_from_string(std::string_view name) noexcept {
  for (ObjectClass c : {ObjectClass::Car, ObjectClass::Truck, ObjectClass::Motorcycle, ObjectClass::Pedestrian,
                        ObjectClass::Cyclist, ObjectClass::Cone, ObjectClass::Bollard})
    if (to_string(c) == name) return c;
  return std::nullopt;
}

bool is_stationary_class(ObjectClass c) noexcept { return c == ObjectClass::Cone || c == ObjectClass::Bollard; }

namespace {

Point2 heading(double yaw) { return {std::cos(yaw), std::sin(yaw)}; }

bool box_contains(const std::array<Point2, 4>& box, Point2 p) {
  for (std::size_t i = 0; i < 4; ++i)
    if (cross(box[(i + 1) % 4] - box[i], p - box[i]) < -kVertexEpsilon) return false;
  return true;
}

bool box_touches_polygon(const std::array<Point2, 4>& box, const Polygon2& poly) {
  const auto& v = poly.vertices;
  for (Point2 c : box)
    if (point_in_polygon(c, poly)) return true;
  for (Point2 p : v)
    if (box_contains(box, p)) return true;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t k = 0; k < 4; ++k)
      if (segments_intersect(v[i], v[(i + 1) % v.size()], box[k], box[(k + 1) % 4])) return true;
  return false;
}

}  // namespace

std::array<Point2, 4> footprint(const TrackedObject& obj) {
  const Point2 h = 0.5 * obj.length * heading(obj.yaw);
  const Point2 n = 0.5 * obj.width * left_normal(heading(obj.yaw));
  const Point2 c = obj.center;
  return {c - h - n, c + h - n, c + h + n, c - h + n};
}

std::vector<TrackedObject> filter_relevant(const std::vector<TrackedObject>& objects, const Polygon2& corridor) {
  std::vector<TrackedObject> out;
  for (const TrackedObject& obj : objects)
    if (box_touches_polygon(footprint(obj), corridor)) out.push_back(obj);
  return out;
}

Point2 corridor_tangent_at(const Corridor& corridor, Point2 p) {
  double best = std::numeric_limits<double>::infinity();
  Point2 dir{1.0, 0.0};
  for (const Polyline2* chain : {&corridor.left, &corridor.right}) {
    const auto& v = chain->vertices;
    for (std::size_t i = 1; i < v.size(); ++i) {
      const Point2 ab = v[i] - v[i - 1];
      const double len2 = dot(ab, ab);
      if (len2 == 0.0) continue;
      const double t = std::clamp(dot(p - v[i - 1], ab) / len2, 0.0, 1.0);
      const double d = distance(p, v[i - 1] + t * ab);
      if (d < best) {
        best = d;
        dir = (1.0 / std::sqrt(len2)) * ab;
      }
    }
  }
  return dir;
}

InteractionKind classify_interaction(const TrackedObject& obj, const Corridor& corridor, double ahead_threshold) {
  if (is_stationary_class(obj.object_class)) return InteractionKind::Ahead;
  const Point2 t = corridor_tangent_at(corridor, obj.center);
  const double delta = std::abs(normalize_angle(obj.yaw - std::atan2(t.y, t.x)));
  const double acute = std::min(delta, std::numbers::pi - delta);
  return acute <= ahead_threshold + 1e-12 ? InteractionKind::Ahead : InteractionKind::Crossing;
}

HalfPlane cutoff_halfplane(const TrackedObject& obj, InteractionKind kind, Point2 ego_position,
                           const Polygon2* corridor) {
  const Point2 h = heading(obj.yaw);
  // Ahead cuts perpendicular to the heading, Crossing cuts parallel to it.
  const Point2 axis = kind == InteractionKind::Ahead ? h : left_normal(h);
  const double half = 0.5 * (kind == InteractionKind::Ahead ? obj.length : obj.width);
  const Point2 a = obj.center + half * axis;
  const Point2 b = obj.center - half * axis;
  const Point2 anchor = distance(a, ego_position) < distance(b, ego_position) ? a : b;

  Point2 reference = ego_position;
  if (std::abs(dot(ego_position - anchor, axis)) <= kVertexEpsilon && corridor != nullptr &&
      !corridor->vertices.empty()) {
    reference = *std::min_element(corridor->vertices.begin(), corridor->vertices.end(), [&](Point2 p, Point2 q) {
      return distance(p, ego_position) < distance(q, ego_position);
    });
  }
  const double side = dot(reference - anchor, axis);
  // Degenerate tie with no corridor to consult: keep the side away from the object centre.
  const Point2 inward = side > 0.0 ? axis : (side < 0.0 ? -1.0 * axis : (anchor == a ? axis : -1.0 * axis));
  return {anchor, inward};
}

std::optional<Polygon2> apply_cutoffs(const Corridor& corridor, const std::vector<TrackedObject>& objects,
                                      Point2 ego_position, double ahead_threshold) {
  std::vector<std::size_t> order(objects.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return distance(objects[i].center, ego_position) < distance(objects[j].center, ego_position);
  });

  std::optional<Polygon2> current = corridor.polygon;
  for (std::size_t idx : order) {
    const TrackedObject& obj = objects[idx];
    const HalfPlane hp =
        cutoff_halfplane(obj, classify_interaction(obj, corridor, ahead_threshold), ego_position, &corridor.polygon);
    current = clip_polygon_halfplane(*current, hp);
    if (!current) return std::nullopt;
  }
  return current;
}

}  // namespace egocorridor

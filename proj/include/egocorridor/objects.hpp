#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "egocorridor/corridor.hpp"
#include "egocorridor/geometry.hpp"

namespace egocorridor {

enum class ObjectClass { Car, Truck, Motorcycle, Pedestrian, Cyclist, Cone, Bollard };

std::string_view to_string(ObjectClass c) noexcept;
std::optional<ObjectClass> object_class_from_string(std::string_view name) noexcept;

/// Tracked traffic participant in the vehicle-leveled frame.
struct TrackedObject {
  Point2 center;
  double yaw = 0.0;  // direction of travel
  double length = 0.0;
  double width = 0.0;
  double speed = 0.0;
  ObjectClass object_class = ObjectClass::Car;
};

bool is_stationary_class(ObjectClass c) noexcept;

/// Box corners, counter-clockwise starting at rear-right.
std::array<Point2, 4> footprint(const TrackedObject& obj);

enum class InteractionKind { Ahead, Crossing };

inline constexpr double kDefaultAheadThreshold = 0.7853981633974483;  // 45 deg

/// Objects whose footprint intersects or touches the corridor polygon.
std::vector<TrackedObject> filter_relevant(const std::vector<TrackedObject>& objects, const Polygon2& corridor);

/// Driving direction of the boundary chain segment nearest to `p`.
Point2 corridor_tangent_at(const Corridor& corridor, Point2 p);

/// Ahead when the acute angle between the object's heading line and the local
/// corridor tangent is <= threshold (tie inclusive), Crossing otherwise.
/// Oncoming traffic therefore counts as Ahead. Stationary classes are always Ahead.
InteractionKind classify_interaction(const TrackedObject& obj, const Corridor& corridor,
                                     double ahead_threshold = kDefaultAheadThreshold);

/// Cut line for one object. Ahead: through the midpoint of the box edge
/// perpendicular to the heading that faces the ego. Crossing: through the
/// midpoint of the long side facing the ego, parallel to the heading. The kept
/// side always contains `ego_position`.
HalfPlane cutoff_halfplane(const TrackedObject& obj, InteractionKind kind, Point2 ego_position,
                           const Polygon2* corridor = nullptr);

/// Clips the corridor with every object's half-plane, nearest object first.
std::optional<Polygon2> apply_cutoffs(const Corridor& corridor, const std::vector<TrackedObject>& objects,
                                      Point2 ego_position, double ahead_threshold = kDefaultAheadThreshold);

}  // namespace egocorridor

#include "egocorridor/corridor.hpp"

#include <algorithm>

#include "egocorridor/error.hpp"

namespace egocorridor {

std::vector<OffsetKnot> offsets_for(const LateralShiftProfile& profile, Side side) {
  std::vector<OffsetKnot> out;
  out.reserve(profile.knots.size());
  for (const ShiftKnot& k : profile.knots)
    out.push_back({k.arc_length, side == Side::Left ? k.shift_left : k.shift_right});
  return out;
}

bool is_valid(const LateralShiftProfile& profile) {
  for (std::size_t i = 0; i < profile.knots.size(); ++i) {
    const ShiftKnot& k = profile.knots[i];
    if (!std::isfinite(k.arc_length) || !std::isfinite(k.shift_left) || !std::isfinite(k.shift_right)) return false;
    if (std::abs(k.shift_left) > kMaxLateralShift || std::abs(k.shift_right) > kMaxLateralShift) return false;
    if (i > 0 && !(k.arc_length > profile.knots[i - 1].arc_length)) return false;
  }
  return true;
}

double interpolate_offset(std::span<const OffsetKnot> knots, double s) {
  if (knots.empty()) return 0.0;
  if (s <= knots.front().arc_length) return knots.front().offset;
  if (s >= knots.back().arc_length) return knots.back().offset;
  const auto hi = std::upper_bound(knots.begin(), knots.end(), s,
                                   [](double v, const OffsetKnot& k) { return v < k.arc_length; });
  const auto lo = hi - 1;
  const double t = (s - lo->arc_length) / (hi->arc_length - lo->arc_length);
  return lo->offset + t * (hi->offset - lo->offset);
}

Polyline2 apply_lateral_shift(const Polyline2& boundary, std::span<const OffsetKnot> offsets) {
  if (offsets.empty()) return boundary;
  const auto& v = boundary.vertices;
  const std::size_t n = v.size();
  Polyline2 out{{}, boundary.frame};
  out.vertices.reserve(n);
  double arc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) arc += distance(v[i - 1], v[i]);
    const Point2 ahead = v[std::min(i + 1, n - 1)];
    const Point2 behind = v[i == 0 ? 0 : i - 1];
    const Point2 tangent = ahead - behind;
    const double len = norm(tangent);
    if (len == 0.0) {
      out.vertices.push_back(v[i]);
      continue;
    }
    const Point2 normal = left_normal((1.0 / len) * tangent);
    out.vertices.push_back(v[i] + interpolate_offset(offsets, arc) * normal);
  }
  return out;
}

Corridor build_corridor(const LaneBoundaries& bounds, double step, double max_range) {
  if (!(step > 0.0) || !(max_range > step))
    throw Error(ErrorKind::InvalidArgument, "build_corridor requires max_range > step > 0");
  if (!is_valid(bounds.left) || !is_valid(bounds.right))
    throw Error(ErrorKind::InsufficientBoundary, "boundary polyline is degenerate");
  if (polyline_length(bounds.left.vertices) < 2.0 * step || polyline_length(bounds.right.vertices) < 2.0 * step)
    throw Error(ErrorKind::InsufficientBoundary, "boundary shorter than two resampling steps");

  Corridor c;
  c.left = resample_polyline(truncate_polyline(bounds.left, max_range), step);
  c.right = resample_polyline(truncate_polyline(bounds.right, max_range), step);

  auto& ring = c.polygon.vertices;
  c.polygon.frame = bounds.left.frame;
  ring.reserve(c.left.vertices.size() + c.right.vertices.size());
  ring.insert(ring.end(), c.left.vertices.begin(), c.left.vertices.end());
  ring.insert(ring.end(), c.right.vertices.rbegin(), c.right.vertices.rend());
  // Shared start or end points collapse into one vertex.
  if (distance(ring.front(), ring.back()) <= kVertexEpsilon) ring.pop_back();
  const auto dup = std::adjacent_find(ring.begin(), ring.end(),
                                      [](Point2 a, Point2 b) { return distance(a, b) <= kVertexEpsilon; });
  if (dup != ring.end()) ring.erase(dup);

  if (signed_area(ring) < 0.0) std::reverse(ring.begin(), ring.end());
  if (ring.size() < 3 || !(signed_area(ring) > 0.0) || !is_simple(ring))
    throw Error(ErrorKind::BoundaryCrossing, "left and right boundaries intersect within range");
  return c;
}

Corridor to_leveled_vehicle(const Corridor& corridor, const Pose& ego) {
  auto transform = [&](const std::vector<Point2>& pts) {
    std::vector<Point2> out;
    out.reserve(pts.size());
    for (const Point2& p : pts) out.push_back(map_to_leveled_vehicle(ego, p));
    return out;
  };
  return Corridor{{transform(corridor.polygon.vertices), Frame::VehicleLeveled},
                  {transform(corridor.left.vertices), Frame::VehicleLeveled},
                  {transform(corridor.right.vertices), Frame::VehicleLeveled}};
}

}  // namespace egocorridor

#pragma once

#include <span>
#include <vector>

#include "egocorridor/geometry.hpp"

namespace egocorridor {

/// Left and right lane boundaries, both ordered in driving direction.
struct LaneBoundaries {
  Polyline2 left;
  Polyline2 right;
};

/// Lateral correction knot. Positive shifts move a boundary toward vehicle-left.
struct ShiftKnot {
  double arc_length = 0.0;
  double shift_left = 0.0;
  double shift_right = 0.0;
};

struct LateralShiftProfile {
  std::vector<ShiftKnot> knots;  // arc_length strictly increasing
};

/// One side of a shift profile: (arc length, offset) pairs.
struct OffsetKnot {
  double arc_length = 0.0;
  double offset = 0.0;
};

enum class Side { Left, Right };

std::vector<OffsetKnot> offsets_for(const LateralShiftProfile& profile, Side side);

inline constexpr double kMaxLateralShift = 2.0;

/// Checks knot ordering and the |shift| <= 2 m sanity bound.
bool is_valid(const LateralShiftProfile& profile);

/// Piecewise-linear offset at arc length `s`, constant beyond the end knots.
double interpolate_offset(std::span<const OffsetKnot> knots, double s);

/// Displaces every vertex along its local leftward normal by the interpolated
/// offset. The tangent at interior vertices is the central difference of the
/// neighbours; endpoints use the adjacent edge.
Polyline2 apply_lateral_shift(const Polyline2& boundary, std::span<const OffsetKnot> offsets);

/// Corridor polygon together with the boundary chains it was built from.
/// The chains carry the driving direction used to classify traffic.
struct Corridor {
  Polygon2 polygon;
  Polyline2 left;
  Polyline2 right;
};

/// Resamples both boundaries at `step`, truncates them at `max_range` and
/// closes the ring (left in order, right reversed). A clockwise ring is
/// reversed. Throws BoundaryCrossing when the ring self-intersects and
/// InsufficientBoundary when a boundary is shorter than 2 * step.
Corridor build_corridor(const LaneBoundaries& bounds, double step, double max_range);

/// Rigid map -> vehicle-leveled transform of the whole corridor.
Corridor to_leveled_vehicle(const Corridor& corridor, const Pose& ego);

}  // namespace egocorridor

#pragma once

#include "egocorridor/elevation.hpp"
#include "egocorridor/pipeline_config.hpp"
#include "egocorridor/projection.hpp"
#include "egocorridor/scene.hpp"

namespace egocorridor {

/// Brute-force reference labeler. For every pixel centre it casts the camera
/// ray into the vehicle-leveled frame, intersects the terrain (z = 0 plane, or
/// the height field by ray marching), and sets the pixel iff the hit point is
/// inside the shift-corrected corridor, on the kept side of every relevant
/// object's cut line, and in a grid cell that the camera can see.
///
/// Shares only primitive types with the polygon pipeline; all predicates are
/// re-derived here. Stage toggles in `config` are honoured the same way.
/// `terrain` may be null (flat world).
Mask render_reference(const SceneFrame& scene, const HeightMap* terrain, const PipelineConfig& config);

inline constexpr double kOracleMarchStep = 0.05;

}  // namespace egocorridor

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "egocorridor/scene.hpp"

namespace egocorridor {

/// Procedural scene families, one per evaluation scenario plus highway.
enum class ScenarioKind { Highway, SharpCurve, NoMarkings, ParkingCars, Others };

inline constexpr ScenarioKind kAllScenarioKinds[] = {ScenarioKind::Highway, ScenarioKind::SharpCurve,
                                                     ScenarioKind::NoMarkings, ScenarioKind::ParkingCars,
                                                     ScenarioKind::Others};

std::string_view to_string(ScenarioKind kind) noexcept;
std::optional<ScenarioKind> scenario_kind_from_string(std::string_view name) noexcept;

enum class TerrainKind { Flat, Ramp };

struct SynthOptions {
  std::vector<ScenarioKind> kinds{ScenarioKind::Highway};  // frame k uses kinds[k % size]
  std::size_t count = 1;
  std::uint64_t seed = 0;
  TerrainKind terrain = TerrainKind::Flat;
  bool obstacles = true;     // occupancy grid with object footprints and roadside clutter
  double max_tilt_deg = 2.0;  // body roll/pitch noise on top of the terrain attitude
};

struct SynthFrame {
  SceneFrame scene;
  ScenarioKind kind;
};

/// Deterministic in (options); frame k depends only on seed, k and its kind.
std::vector<SynthFrame> synthesize(const SynthOptions& options);

/// Writes <frame_id>.json per frame and manifest.csv (frame_id,scenario).
void write_synth(const std::vector<SynthFrame>& frames, const std::filesystem::path& out_dir);

}  // namespace egocorridor

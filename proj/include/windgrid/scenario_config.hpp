#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "windgrid/gridworld.hpp"

namespace windgrid {

/// Line-oriented `key = value` scenario files.
///
/// Recognised keys:
///   world_width, world_height, world_altitude, cell_size_m, wind_max_mps,
///   n_goals, c_r, charging_x, charging_y, start_x, start_y,
///   relocation_period, seed,
///   goal_placement (centers|continuous), goal_cells (x:y;x:y;...),
///   goal_radius_min_m, goal_radius_max_m, base_altitude_m, altitude_step_m
///
/// `#` starts a comment. Unknown or repeated keys are errors. Keys absent
/// from the file keep the value they have in `base`. Setting wind_max_mps
/// rebuilds the wind set as {-W, -W/2, 0, W/2, W}.
EnvConfig parse_scenario_config(std::istream& in, EnvConfig base = {}, std::string_view source = "<config>");
EnvConfig load_scenario_config(const std::filesystem::path& path, EnvConfig base = {});

/// Applies a single `key=value` override.
void apply_config_entry(EnvConfig& config, std::string_view key, std::string_view value,
                        std::string_view where = "<override>");

/// Canonical rendering of every recognised key; parse_scenario_config of the
/// result reproduces the configuration.
std::string serialize_scenario_config(const EnvConfig& config);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex_digest(std::uint64_t digest);

/// Digest of the canonical config text (drag table excluded).
std::uint64_t config_digest(const EnvConfig& config);
std::uint64_t drag_table_digest(const DragTable& table);

}  // namespace windgrid

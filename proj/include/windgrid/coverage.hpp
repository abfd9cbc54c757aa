#pragma once

#include <vector>

#include "windgrid/gridworld.hpp"
#include "windgrid/planners.hpp"

namespace windgrid {

/// Ordered cell visits (z ignored; coverage flies at the lowest level).
using CoveragePath = std::vector<Cell>;

/// Boustrophedon sweep: row 0 left to right, row 1 right to left, and so on.
CoveragePath serpentine_path(int width, int height);

/// The serpentine mirrored so that it begins at the configured start cell,
/// which must be a corner of the grid.
CoveragePath anchored_serpentine(const EnvConfig& config);

/// True when consecutive cells are 8-neighbours, all cells are in the grid
/// and every cell appears exactly once.
bool is_complete_coverage(const CoveragePath& path, int width, int height);

/// Flies `path` through a fresh GridWorld at the start altitude, stopping at
/// the first terminal step (battery, goals complete) or the end of the path.
EpisodeTrace run_coverage(const EnvConfig& config, const CoveragePath& path, std::size_t wind_id,
                          std::size_t episode_index = 0);

}  // namespace windgrid

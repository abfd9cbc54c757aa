#include "windgrid/coverage.hpp"

#include <cstdlib>
#include <sstream>

#include "windgrid/errors.hpp"

namespace windgrid {

CoveragePath serpentine_path(int width, int height) {
  if (width < 1 || height < 1) throw ConfigError("coverage: grid dimensions must be >= 1");
  CoveragePath path;
  path.reserve(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    for (int i = 0; i < width; ++i) path.push_back({y % 2 == 0 ? i : width - 1 - i, y, 0});
  }
  return path;
}

CoveragePath anchored_serpentine(const EnvConfig& config) {
  const int w = config.world_width;
  const int h = config.world_height;
  const Cell start = config.start_cell;
  const bool at_x_edge = start.x == 0 || start.x == w - 1;
  const bool at_y_edge = start.y == 0 || start.y == h - 1;
  if (!at_x_edge || !at_y_edge) throw ConfigError("coverage: start cell must be a grid corner");
  CoveragePath path = serpentine_path(w, h);
  for (Cell& c : path) {
    if (start.x == w - 1 && w > 1) c.x = w - 1 - c.x;
    if (start.y == h - 1 && h > 1) c.y = h - 1 - c.y;
    c.z = start.z;
  }
  return path;
}

bool is_complete_coverage(const CoveragePath& path, int width, int height) {
  if (path.size() != static_cast<std::size_t>(width) * height) return false;
  std::vector<bool> seen(path.size(), false);
  for (std::size_t i = 0; i < path.size(); ++i) {
    const Cell& c = path[i];
    if (c.x < 0 || c.x >= width || c.y < 0 || c.y >= height) return false;
    const auto slot = static_cast<std::size_t>(c.y) * width + c.x;
    if (seen[slot]) return false;
    seen[slot] = true;
    if (i > 0) {
      const int dx = std::abs(c.x - path[i - 1].x);
      const int dy = std::abs(c.y - path[i - 1].y);
      if (dx > 1 || dy > 1 || dx + dy == 0) return false;
    }
  }
  return true;
}

EpisodeTrace run_coverage(const EnvConfig& config, const CoveragePath& path, std::size_t wind_id,
                          std::size_t episode_index) {
  GridWorld env(config);
  if (path.empty() || path.front().x != config.start_cell.x || path.front().y != config.start_cell.y) {
    throw ContractViolation("coverage: path must begin at the start cell");
  }
  EpisodeTrace trace;
  trace.episode = episode_index;
  trace.wind_id = wind_id;
  trace.config_digest = env.config_digest();
  GridState state = env.reset(episode_index, wind_id);
  for (std::size_t i = 1; i < path.size() && !env.done(); ++i) {
    const MoveDirection move{path[i].x - path[i - 1].x, path[i].y - path[i - 1].y, 0};
    const auto action = action_for(move);
    if (!action || !env.in_domain(path[i].x, path[i].y, state.z)) {
      std::ostringstream msg;
      msg << "coverage: leg " << i << " is not a single in-grid move";
      throw ContractViolation(msg.str());
    }
    const StepOutcome out = env.step(*action);
    trace.append(state, out);
    state = out.next_state;
  }
  return trace;
}

}  // namespace windgrid

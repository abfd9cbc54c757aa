#include "windgrid/gridworld.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "windgrid/errors.hpp"
#include "windgrid/rng.hpp"
#include "windgrid/scenario_config.hpp"

namespace windgrid {

namespace {

constexpr std::array<MoveDirection, kNumActions> kDirections{{
    {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {-1, 1, 0}, {-1, 0, 0},
    {-1, -1, 0}, {0, -1, 0}, {1, -1, 0}, {0, 0, 1}, {0, 0, -1},
}};

constexpr std::uint64_t kGoalStream = 0x676f616c00000000ULL;

}  // namespace

MoveDirection action_direction(ActionId action) {
  if (action.id < 1 || action.id > kNumActions) throw ContractViolation("action id out of range [1, 10]");
  return kDirections[static_cast<std::size_t>(action.index())];
}

std::optional<ActionId> action_for(const MoveDirection& move) {
  for (int i = 0; i < kNumActions; ++i) {
    if (kDirections[static_cast<std::size_t>(i)] == move) return ActionId::from_index(i);
  }
  return std::nullopt;
}

double terminal_reward(TerminalReason reason) {
  switch (reason) {
    case TerminalReason::AllGoalsFound: return 100.0;
    case TerminalReason::BatteryDepleted: return -100.0;
    case TerminalReason::LeftDomain: return -100.0;
    case TerminalReason::NoValidActions: return -200.0;
  }
  return 0.0;
}

std::string_view to_string(TerminalReason reason) {
  switch (reason) {
    case TerminalReason::AllGoalsFound: return "all_goals_found";
    case TerminalReason::BatteryDepleted: return "battery_depleted";
    case TerminalReason::LeftDomain: return "left_domain";
    case TerminalReason::NoValidActions: return "no_valid_actions";
  }
  return "unknown";
}

std::vector<WindVector> EnvConfig::default_wind_set(double w_max) {
  return {WindVector(-w_max, 0.0), WindVector(-w_max / 2.0, 0.0), WindVector(0.0, 0.0),
          WindVector(w_max / 2.0, 0.0), WindVector(w_max, 0.0)};
}

void EnvConfig::validate() const {
  auto fail = [](const std::string& why) { throw ConfigError("environment: " + why); };
  if (world_width < 1 || world_height < 1 || world_altitude < 1) fail("world dimensions must be >= 1");
  if (!(cell_size > 0)) fail("cell_size must be positive");
  if (!(wind_max >= 0)) fail("wind_max must be >= 0");
  if (wind_set.empty()) fail("wind set is empty");
  for (const auto& w : wind_set) {
    if (!w.allFinite() || w.norm() > wind_max * (1.0 + 1e-12)) fail("wind vector exceeds wind_max");
  }
  if (n_goals < 1) fail("n_goals must be >= 1");
  if (!(c_r > 0)) fail("c_r must be positive");
  if (goal_relocation_period < 1) fail("relocation period must be >= 1");
  const auto inside = [&](const Cell& c) {
    return c.x >= 0 && c.x < world_width && c.y >= 0 && c.y < world_height && c.z >= 0 && c.z < world_altitude;
  };
  if (!inside(start_cell)) fail("start cell outside the domain");
  if (charging_station && !inside(*charging_station)) fail("charging station outside the domain");
  if (!(charging_reward <= 0)) fail("charging reward must be <= 0");
  if (!goal_cells.empty()) {
    if (static_cast<int>(goal_cells.size()) != n_goals) fail("goal_cells count must equal n_goals");
    for (const auto& c : goal_cells) {
      if (!inside({c.x, c.y, 0})) fail("goal cell outside the domain");
    }
  } else if (goal_placement == GoalPlacement::CellCenters && n_goals > world_width * world_height - 1) {
    fail("more goals than free cells");
  }
  if (!(goal_radius_min > 0) || goal_radius_max < goal_radius_min) fail("goal radius range invalid");
  if (!(base_altitude > 0) || !(altitude_step > 0)) fail("altitudes must be positive");
  camera.validate();
  power.validate();
}

double StepOutcome::recomposed_reward(double c_r) const {
  double r = compose_reward(r_movement, n_new_detections, c_r);
  r += charging_penalty;
  if (terminal) r += terminal_reward(*terminal);
  return r;
}

VisitedPairs::VisitedPairs(int width, int height, int altitude)
    : width_(width), height_(height), altitude_(altitude),
      flags_(static_cast<std::size_t>(width) * height * altitude * kNumActions, 0) {}

std::size_t VisitedPairs::slot(const Cell& cell, ActionId action) const {
  if (cell.x < 0 || cell.x >= width_ || cell.y < 0 || cell.y >= height_ || cell.z < 0 || cell.z >= altitude_) {
    throw ContractViolation("visited pair outside the domain");
  }
  const auto c = (static_cast<std::size_t>(cell.z) * height_ + cell.y) * width_ + cell.x;
  return c * kNumActions + static_cast<std::size_t>(action.index());
}

bool VisitedPairs::contains(const Cell& cell, ActionId action) const { return flags_[slot(cell, action)] != 0; }

void VisitedPairs::insert(const Cell& cell, ActionId action) {
  auto& flag = flags_[slot(cell, action)];
  if (!flag) ++count_;
  flag = 1;
}

void VisitedPairs::clear() {
  std::fill(flags_.begin(), flags_.end(), 0);
  count_ = 0;
}

std::vector<ActionId> valid_actions(const GridState& state, const VisitedPairs& visited, const EnvConfig& config) {
  std::vector<ActionId> out;
  out.reserve(kNumActions);
  const Cell cell = state.cell();
  for (int i = 0; i < kNumActions; ++i) {
    const ActionId a = ActionId::from_index(i);
    if (a == kAscend && state.z + 1 >= config.world_altitude) continue;
    if (a == kDescend && state.z <= 0) continue;
    if (visited.contains(cell, a)) continue;
    out.push_back(a);
  }
  return out;
}

GridWorld::GridWorld(EnvConfig config)
    : config_(std::move(config)), registry_(config_.merge_radius()) {
  config_.validate();
  PowerParams p = config_.power;
  p.cell_size = config_.cell_size;
  power_ = calibrate(config_.drag_table, p, config_.wind_max);
  digest_ = windgrid::config_digest(config_);
  visited_ = VisitedPairs(config_.world_width, config_.world_height, config_.world_altitude);
  done_ = true;
}

bool GridWorld::in_domain(int x, int y, int z) const {
  return x >= 0 && x < config_.world_width && y >= 0 && y < config_.world_height && z >= 0 &&
         z < config_.world_altitude;
}

Eigen::Vector3d GridWorld::drone_position(const Cell& cell) const {
  return {(cell.x + 0.5) * config_.cell_size, (cell.y + 0.5) * config_.cell_size, config_.altitude_m(cell.z)};
}

std::vector<GoalObject> GridWorld::goal_layout(std::size_t block) const {
  Rng rng = make_rng(config_.seed, kGoalStream + block);
  const double cs = config_.cell_size;
  auto radius = [&] { return uniform_real(rng, config_.goal_radius_min, config_.goal_radius_max); };
  std::vector<GoalObject> goals;
  if (!config_.goal_cells.empty()) {
    int id = 0;
    for (const Cell& c : config_.goal_cells) goals.push_back({(c.x + 0.5) * cs, (c.y + 0.5) * cs, radius(), id++});
    return goals;
  }
  if (config_.goal_placement == GoalPlacement::CellCenters) {
    std::vector<Cell> free;
    for (int y = 0; y < config_.world_height; ++y) {
      for (int x = 0; x < config_.world_width; ++x) {
        if (x == config_.start_cell.x && y == config_.start_cell.y) continue;
        free.push_back({x, y, 0});
      }
    }
    // partial Fisher-Yates
    for (int i = 0; i < config_.n_goals; ++i) {
      const std::size_t j = static_cast<std::size_t>(i) + uniform_index(rng, free.size() - static_cast<std::size_t>(i));
      std::swap(free[static_cast<std::size_t>(i)], free[j]);
      const Cell c = free[static_cast<std::size_t>(i)];
      goals.push_back({(c.x + 0.5) * cs, (c.y + 0.5) * cs, radius(), i});
    }
    return goals;
  }
  const double width_m = config_.world_width * cs;
  const double height_m = config_.world_height * cs;
  // keep goals separable by the detection registry
  const double spacing = config_.merge_radius();
  int attempts = 0;
  while (static_cast<int>(goals.size()) < config_.n_goals) {
    if (++attempts > 100000) throw ConfigError("environment: cannot place goals with the required spacing");
    const double gx = uniform_real(rng, 0.0, width_m);
    const double gy = uniform_real(rng, 0.0, height_m);
    const bool crowded = std::any_of(goals.begin(), goals.end(), [&](const GoalObject& g) {
      return std::hypot(g.gx - gx, g.gy - gy) < spacing;
    });
    if (crowded) continue;
    goals.push_back({gx, gy, radius(), static_cast<int>(goals.size())});
  }
  return goals;
}

GridState GridWorld::reset(std::size_t episode_index, std::size_t wind_id) {
  if (wind_id >= config_.wind_set.size()) throw ContractViolation("wind id outside the wind set");
  const std::size_t block = episode_index / static_cast<std::size_t>(config_.goal_relocation_period);
  if (!layout_block_ || *layout_block_ != block) {
    goals_ = goal_layout(block);
    layout_block_ = block;
  }
  registry_.clear();
  visited_.clear();
  state_ = GridState{config_.start_cell.x, config_.start_cell.y, config_.start_cell.z, kBatteryMax, wind_id};
  done_ = false;
  return state_;
}

std::vector<ActionId> GridWorld::valid_actions() const {
  if (done_) return {};
  return windgrid::valid_actions(state_, visited_, config_);
}

bool GridWorld::is_valid(ActionId action) const {
  const auto valid = valid_actions();
  return std::find(valid.begin(), valid.end(), action) != valid.end();
}

StepOutcome GridWorld::step(ActionId action) {
  if (done_) throw ContractViolation("step() called on a terminated episode");
  if (!is_valid(action)) {
    std::ostringstream msg;
    msg << "action " << action.id << " is not valid at (" << state_.x << ", " << state_.y << ", " << state_.z << ")";
    throw ContractViolation(msg.str());
  }
  const MoveDirection move = action_direction(action);
  const double cost = step_power_cost(move, wind(), config_.drag_table, power_);

  StepOutcome out;
  out.action = action;
  out.energy = cost;
  out.r_movement = -cost;
  if (move.is_vertical()) {
    out.leg_seconds = config_.altitude_step / power_.ground_speed;
  } else {
    out.leg_seconds = (move.is_diagonal() ? std::numbers::sqrt2 : 1.0) * config_.cell_size / power_.ground_speed;
  }

  visited_.insert(state_.cell(), action);

  GridState next = state_;
  next.x += move.dx;
  next.y += move.dy;
  next.z += move.dz;
  if (!config_.unlimited_battery) next.battery = std::max(0.0, state_.battery - cost);

  const bool left = !in_domain(next.x, next.y, next.z);
  if (!left) {
    out.n_new_detections = static_cast<int>(detect(drone_position(next.cell()), config_.camera, goals_, registry_).size());
  }
  const bool depleted = !config_.unlimited_battery && next.battery <= 0.0;
  if (!left && !depleted && config_.charging_station && config_.charging_station->x == next.x &&
      config_.charging_station->y == next.y) {
    next.battery = kBatteryMax;
    out.charging_penalty = config_.charging_reward;
  }

  state_ = next;
  if (left) {
    out.terminal = TerminalReason::LeftDomain;
  } else if (depleted) {
    out.terminal = TerminalReason::BatteryDepleted;
  } else if (registry_.size() >= static_cast<std::size_t>(config_.n_goals)) {
    out.terminal = TerminalReason::AllGoalsFound;
  } else if (windgrid::valid_actions(state_, visited_, config_).empty()) {
    out.terminal = TerminalReason::NoValidActions;
  }
  done_ = out.terminal.has_value();
  out.next_state = state_;
  out.r_t = out.recomposed_reward(config_.c_r);
  return out;
}

}  // namespace windgrid

#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "windgrid/kinematics.hpp"
#include "windgrid/perception.hpp"
#include "windgrid/power_model.hpp"

namespace windgrid {

inline constexpr int kNumActions = 10;
inline constexpr double kBatteryMax = 100.0;

/// Action ids 1-8 move to the lateral neighbours counter-clockwise from +x
/// (1 = +x, 2 = +x+y, 3 = +y, ..., 8 = +x-y); 9 ascends, 10 descends.
struct ActionId {
  int id = 1;

  constexpr int index() const { return id - 1; }
  constexpr bool is_lateral() const { return id >= 1 && id <= 8; }
  static constexpr ActionId from_index(int index) { return ActionId{index + 1}; }
  friend constexpr bool operator==(ActionId, ActionId) = default;
  friend constexpr auto operator<=>(ActionId, ActionId) = default;
};

inline constexpr ActionId kAscend{9};
inline constexpr ActionId kDescend{10};

MoveDirection action_direction(ActionId action);
/// Inverse of action_direction; nullopt when `move` is not a single legal step.
std::optional<ActionId> action_for(const MoveDirection& move);

struct Cell {
  int x = 0;
  int y = 0;
  int z = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

struct GridState {
  int x = 0;
  int y = 0;
  int z = 0;
  double battery = kBatteryMax;
  std::size_t wind_id = 0;

  Cell cell() const { return {x, y, z}; }
  friend bool operator==(const GridState&, const GridState&) = default;
};

enum class TerminalReason { AllGoalsFound, BatteryDepleted, LeftDomain, NoValidActions };

double terminal_reward(TerminalReason reason);
std::string_view to_string(TerminalReason reason);

enum class GoalPlacement { CellCenters, Continuous };

struct EnvConfig {
  int world_width = 5;
  int world_height = 5;
  int world_altitude = 1;
  double cell_size = 10.0;  ///< m
  double wind_max = 10.0;   ///< m/s
  std::vector<WindVector> wind_set = default_wind_set(10.0);
  int n_goals = 4;
  double c_r = 50.0;
  std::optional<Cell> charging_station;
  double charging_reward = -30.0;
  Cell start_cell{};
  int goal_relocation_period = 100;
  std::uint64_t seed = 0;

  GoalPlacement goal_placement = GoalPlacement::CellCenters;
  /// Fixed goal layout (cell centers). Overrides random placement when set.
  std::vector<Cell> goal_cells;
  double goal_radius_min = 0.5;  ///< m
  double goal_radius_max = 0.5;  ///< m

  double base_altitude = 4.0;   ///< height above ground at z = 0 (m)
  double altitude_step = 10.0;  ///< m per altitude level

  CameraModel camera{};
  DragTable drag_table = DragTable::synthetic_default();
  /// Ground speed and vertical costs; scale_k and cell_size are overwritten
  /// by calibration when the environment is built.
  PowerParams power{};
  bool unlimited_battery = false;

  /// w_x in {-W, -W/2, 0, W/2, W}, w_y = 0.
  static std::vector<WindVector> default_wind_set(double w_max);

  std::size_t cell_count() const {
    return static_cast<std::size_t>(world_width) * world_height * world_altitude;
  }
  double altitude_m(int z) const { return base_altitude + z * altitude_step; }
  double merge_radius() const { return cell_size / 2.0; }

  /// Throws ConfigError on any invariant violation.
  void validate() const;
};

/// Reward composition: r_movement + n_detections * c_r.
inline double compose_reward(double r_movement, int n_detections, double c_r) {
  return r_movement + n_detections * c_r;
}

/// (cell, action) pairs already flown this episode.
class VisitedPairs {
 public:
  VisitedPairs() = default;
  VisitedPairs(int width, int height, int altitude);

  bool contains(const Cell& cell, ActionId action) const;
  void insert(const Cell& cell, ActionId action);
  void clear();
  std::size_t size() const { return count_; }

 private:
  std::size_t slot(const Cell& cell, ActionId action) const;

  int width_ = 0, height_ = 0, altitude_ = 0;
  std::vector<std::uint8_t> flags_;
  std::size_t count_ = 0;
};

/// All 10 actions minus vertical moves past the altitude bounds and pairs
/// already flown. Lateral moves off the grid stay listed.
std::vector<ActionId> valid_actions(const GridState& state, const VisitedPairs& visited, const EnvConfig& config);

struct StepOutcome {
  GridState next_state;
  double r_movement = 0.0;
  double energy = 0.0;  ///< battery units spent on the leg (= -r_movement)
  int n_new_detections = 0;
  double charging_penalty = 0.0;  ///< charging_reward when the station was reached, else 0
  std::optional<TerminalReason> terminal;
  double r_t = 0.0;
  double leg_seconds = 0.0;
  ActionId action{};

  /// r_movement + c_r * n + charging + terminal reward, in that order.
  double recomposed_reward(double c_r) const;
};

/// The coarse-coded MDP. One instance is single-threaded; independent
/// instances share nothing.
class GridWorld {
 public:
  explicit GridWorld(EnvConfig config);

  const EnvConfig& config() const { return config_; }
  /// Calibrated power parameters in use.
  const PowerParams& power() const { return power_; }
  /// Digest of the configuration (see scenario_config.hpp).
  std::uint64_t config_digest() const { return digest_; }

  /// Start of an episode. Goals are regenerated when `episode_index` enters
  /// a new relocation block; the layout is a pure function of (seed, block).
  GridState reset(std::size_t episode_index, std::size_t wind_id);

  std::vector<ActionId> valid_actions() const;
  bool is_valid(ActionId action) const;

  /// Throws ContractViolation if `action` is not currently valid or the
  /// episode has already terminated.
  StepOutcome step(ActionId action);

  const GridState& state() const { return state_; }
  bool done() const { return done_; }
  std::span<const GoalObject> goals() const { return goals_; }
  const DetectionRegistry& registry() const { return registry_; }
  const VisitedPairs& visited() const { return visited_; }
  std::size_t detections() const { return registry_.size(); }
  const WindVector& wind() const { return config_.wind_set.at(state_.wind_id); }

  bool in_domain(int x, int y, int z) const;
  /// Camera position (m) above the center of `cell`.
  Eigen::Vector3d drone_position(const Cell& cell) const;

  /// Goal layout for relocation block `block`.
  std::vector<GoalObject> goal_layout(std::size_t block) const;

 private:
  EnvConfig config_;
  PowerParams power_;
  std::uint64_t digest_ = 0;
  GridState state_{};
  std::vector<GoalObject> goals_;
  std::optional<std::size_t> layout_block_;
  DetectionRegistry registry_;
  VisitedPairs visited_;
  bool done_ = false;
};

}  // namespace windgrid

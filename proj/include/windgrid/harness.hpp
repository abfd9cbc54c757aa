#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "windgrid/coverage.hpp"
#include "windgrid/gridworld.hpp"
#include "windgrid/planners.hpp"

namespace windgrid {

enum class ScenarioId { S1_Planar5x5, S2_SparseGoalsCharging, S3_ThreeD, S4_LargeExploration };

/// Accepts "s1".."s4" (any case) or the full enumerator name.
ScenarioId parse_scenario_id(std::string_view text);
std::string_view to_string(ScenarioId id);

/// Fully specified configuration for each scenario.
///   S1  5x5x1, cell 10 m, four fixed goals, start in the (W-1, 0) corner
///   S2  10x6x1, two goals and a charging cell
///   S3  7x3x2 micro-layout, altitudes 4 m and 25 m
///   S4  21x21x5, cell 30 m, ten continuous goals relocated every 100 episodes
EnvConfig scenario_preset(ScenarioId id);

/// S3 flown at a single altitude.
EnvConfig s3_planar_preset();
/// S4 shrunk to 11x11x3 for quick runs.
EnvConfig s4_desk_preset();

/// Everything one planner produced at one wind field.
struct PlannerRuns {
  std::vector<EpisodeTrace> training;  ///< empty for the coverage planner
  EpisodeTrace battery;                ///< evaluation run with the 100-unit battery
  std::optional<EpisodeTrace> unlimited;
};

/// One compared quantity. `ratio` is rl / coverage and is only formed when
/// both sides exist and the coverage side is nonzero; otherwise `flag` says why.
struct MetricComparison {
  std::optional<double> rl;
  std::optional<double> coverage;
  std::optional<double> ratio;
  std::string flag;
};

struct WindComparison {
  std::size_t wind_id = 0;
  double wind_x = 0.0;
  double wind_y = 0.0;
  MetricComparison detections_per_battery;
  MetricComparison time_to_all_goals_s;  ///< unlimited-battery runs
  MetricComparison mean_reward;          ///< RL: last 10% of training episodes
  MetricComparison energy_per_detection;
};

struct ComparisonReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string algorithm;
  std::size_t episodes = 0;
  std::uint64_t config_digest = 0;
  std::uint64_t drag_table_digest = 0;
  std::vector<WindComparison> winds;
};

/// Mean total reward over the last ceil(10%) of `traces`.
double tail_mean_reward(const std::vector<EpisodeTrace>& traces);

/// Throws ContractViolation when the runs were produced under different
/// configurations or wind fields.
WindComparison compare(const PlannerRuns& rl, const PlannerRuns& coverage, const EnvConfig& config);

std::string report_json(const ComparisonReport& report);
/// `episode,wind_id,steps,total_reward,energy,detections,terminal_reason`
std::string episodes_csv(const std::vector<EpisodeTrace>& traces);
/// One row per step of a single trace.
std::string steps_csv(const EpisodeTrace& trace);
/// Cell sequence of a trace, starting at the start cell.
std::string path_csv(const EpisodeTrace& trace);
/// Episode reward and 10-episode rolling mean.
std::string reward_curve_csv(const std::vector<EpisodeTrace>& traces);

struct RunRequest {
  std::string name = "custom";
  EnvConfig config{};
  std::uint64_t seed = 0;
  std::size_t episodes = 200;
  Algorithm algorithm = Algorithm::QLearning;
  /// nullopt runs every entry of the wind set.
  std::optional<std::size_t> wind_id;
  std::optional<std::filesystem::path> out_dir;
  bool emit_plot_data = false;
};

/// Per wind field: train on that field, greedy evaluation, coverage, and the
/// unlimited-battery repeats of both. Wind fields run concurrently. When
/// `out_dir` is set, writes report.json, config.txt and per-wind
/// wind_<k>/{episodes.csv, qtable.txt, eval_steps.csv, coverage_steps.csv}.
ComparisonReport run_comparison(const RunRequest& request);

/// Writes `text` to `path` in one piece; ConfigError if it cannot.
void write_text_file(const std::filesystem::path& path, std::string_view text);
/// Creates `dir` if needed; ConfigError if it is not a writable directory.
void ensure_output_dir(const std::filesystem::path& dir);

}  // namespace windgrid

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "windgrid/errors.hpp"
#include "windgrid/harness.hpp"
#include "windgrid/scenario_config.hpp"

using namespace windgrid;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("windgrid_test_" + name);
  fs::remove_all(p);
  return p;
}

PlannerRuns coverage_runs(const EnvConfig& c, std::size_t wind) {
  PlannerRuns r;
  r.battery = run_coverage(c, anchored_serpentine(c), wind);
  EnvConfig u = c;
  u.unlimited_battery = true;
  r.unlimited = run_coverage(u, anchored_serpentine(u), wind);
  return r;
}

}  // namespace

TEST(ScenarioId, Parse) {
  EXPECT_EQ(parse_scenario_id("s1"), ScenarioId::S1_Planar5x5);
  EXPECT_EQ(parse_scenario_id("S3"), ScenarioId::S3_ThreeD);
  EXPECT_EQ(parse_scenario_id("S4_LargeExploration"), ScenarioId::S4_LargeExploration);
  EXPECT_THROW(parse_scenario_id("s5"), ConfigError);
  for (auto id : {ScenarioId::S1_Planar5x5, ScenarioId::S2_SparseGoalsCharging, ScenarioId::S3_ThreeD,
                  ScenarioId::S4_LargeExploration}) {
    EXPECT_EQ(parse_scenario_id(to_string(id)), id);
  }
}

TEST(Presets, StateActionSizes) {
  const auto sa = [](const EnvConfig& c) { return qtable_dims(c).states() * kNumActions; };
  EXPECT_EQ(sa(scenario_preset(ScenarioId::S1_Planar5x5)), 1250u);  // 25 cells x 5 winds x 10
  const EnvConfig s4 = scenario_preset(ScenarioId::S4_LargeExploration);
  EXPECT_EQ(s4.cell_count(), 2205u);
  EXPECT_EQ(sa(s4), 110250u);
  EXPECT_DOUBLE_EQ(s4.world_width * s4.cell_size, 630.0);
  EXPECT_EQ(s3_planar_preset().world_altitude, 1);
  EXPECT_EQ(s4_desk_preset().cell_count(), 363u);
  const EnvConfig s2 = scenario_preset(ScenarioId::S2_SparseGoalsCharging);
  EXPECT_TRUE(s2.charging_station.has_value());
  EXPECT_EQ(s2.n_goals, 2);
}

TEST(Presets, CellFootprintCoversContinuousGoals) {
  // a drone over a cell centre must see the whole cell at the lowest level
  for (const EnvConfig& c : {scenario_preset(ScenarioId::S2_SparseGoalsCharging), s4_desk_preset()}) {
    const GroundRect r = footprint({0, 0, c.base_altitude}, c.camera);
    EXPECT_GE(r.half_width(), c.cell_size / 2);
    EXPECT_GE(r.half_height(), c.cell_size / 2);
    EXPECT_GE(projected_diameter_px(c.goal_radius_min, c.base_altitude, c.camera), c.camera.min_blob_px);
  }
}

TEST(Compare, IdenticalTracesGiveUnitRatios) {
  const EnvConfig c = scenario_preset(ScenarioId::S1_Planar5x5);
  const PlannerRuns cov = coverage_runs(c, 2);
  const WindComparison w = compare(cov, cov, c);
  EXPECT_DOUBLE_EQ(*w.detections_per_battery.ratio, 1.0);
  EXPECT_DOUBLE_EQ(*w.time_to_all_goals_s.ratio, 1.0);
  EXPECT_DOUBLE_EQ(*w.mean_reward.ratio, 1.0);
  EXPECT_DOUBLE_EQ(*w.energy_per_detection.ratio, 1.0);
}

TEST(Compare, ZeroCoverageDetectionsFlagged) {
  EnvConfig c = scenario_preset(ScenarioId::S1_Planar5x5);
  c.goal_cells = {{4, 4, 0}, {3, 4, 0}, {2, 4, 0}, {1, 4, 0}};
  const PlannerRuns cov = coverage_runs(c, 4);
  ASSERT_EQ(cov.battery.detections, 0);
  PlannerRuns rl = cov;
  rl.battery.detections = 2;
  const WindComparison w = compare(rl, cov, c);
  EXPECT_FALSE(w.detections_per_battery.ratio.has_value());
  EXPECT_EQ(w.detections_per_battery.flag, "coverage: 0 detections");
  EXPECT_FALSE(w.energy_per_detection.ratio.has_value());
}

TEST(Compare, RefusesMismatchedConfigs) {
  const EnvConfig c = scenario_preset(ScenarioId::S1_Planar5x5);
  EnvConfig other = c;
  other.c_r = 25;
  const PlannerRuns a = coverage_runs(c, 2);
  const PlannerRuns b = coverage_runs(other, 2);
  EXPECT_THROW(compare(a, b, c), ContractViolation);
  EXPECT_THROW(compare(a, coverage_runs(c, 3), c), ContractViolation);
}

TEST(Compare, TimeUsesLegGeometry) {
  const EnvConfig c = scenario_preset(ScenarioId::S1_Planar5x5);
  const PlannerRuns cov = coverage_runs(c, 2);
  ASSERT_TRUE(cov.unlimited->time_to_all_goals());
  // serpentine legs are all axis moves
  EXPECT_NEAR(*cov.unlimited->time_to_all_goals(), cov.unlimited->step_count() * c.cell_size / 22.0, 1e-9);
}

TEST(Csv, EpisodesRowCount) {
  TrainOptions o;
  o.episodes = 23;
  const TrainResult r = train(scenario_preset(ScenarioId::S1_Planar5x5), o);
  const std::string csv = episodes_csv(r.traces);
  EXPECT_EQ(line_count(csv), 24u);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "episode,wind_id,steps,total_reward,energy,detections,terminal_reason");
  EXPECT_EQ(line_count(reward_curve_csv(r.traces)), 24u);
}

TEST(RunComparison, WritesReproducibleOutputs) {
  RunRequest req;
  req.name = "S1";
  req.config = scenario_preset(ScenarioId::S1_Planar5x5);
  req.episodes = 40;
  req.seed = 3;
  req.config.seed = 3;
  req.wind_id = 2;
  req.emit_plot_data = true;
  req.out_dir = scratch("a");
  const ComparisonReport a = run_comparison(req);
  req.out_dir = scratch("b");
  run_comparison(req);
  for (const char* f : {"report.json", "config.txt", "wind_2/episodes.csv", "wind_2/qtable.txt", "wind_2/eval_steps.csv",
                        "wind_2/coverage_steps.csv", "wind_2/path_rl.csv", "wind_2/reward_curve.csv"}) {
    const std::string x = slurp(scratch("").parent_path() / "windgrid_test_a" / f);
    EXPECT_FALSE(x.empty()) << f;
    EXPECT_EQ(x, slurp(*req.out_dir / f)) << f;
  }
  const auto j = nlohmann::json::parse(slurp(*req.out_dir / "report.json"));
  EXPECT_EQ(j["config_digest"], hex_digest(config_digest(req.config)));
  EXPECT_EQ(j["drag_table_digest"], hex_digest(drag_table_digest(req.config.drag_table)));
  EXPECT_EQ(j["winds"].size(), 1u);
  EXPECT_EQ(line_count(slurp(*req.out_dir / "wind_2/episodes.csv")), 41u);
  EXPECT_EQ(a.winds.size(), 1u);
}

TEST(RunComparison, AllWindsInParallel) {
  RunRequest req;
  req.config = scenario_preset(ScenarioId::S1_Planar5x5);
  req.episodes = 20;
  const ComparisonReport r = run_comparison(req);
  ASSERT_EQ(r.winds.size(), 5u);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(r.winds[k].wind_id, k);
  EXPECT_EQ(report_json(r), report_json(run_comparison(req)));
}

TEST(RunComparison, UnwritableOutput) {
  const fs::path file = scratch("file");
  std::ofstream(file) << "x";
  RunRequest req;
  req.config = scenario_preset(ScenarioId::S1_Planar5x5);
  req.episodes = 5;
  req.out_dir = file / "sub";
  EXPECT_THROW(run_comparison(req), ConfigError);
}

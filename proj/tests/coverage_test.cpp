#include <gtest/gtest.h>

#include <cmath>

#include "windgrid/coverage.hpp"
#include "windgrid/errors.hpp"

using namespace windgrid;

TEST(Serpentine, SingleRow) {
  const CoveragePath p = serpentine_path(6, 1);
  ASSERT_EQ(p.size(), 6u);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(p[static_cast<std::size_t>(i)], (Cell{i, 0, 0}));
}

TEST(Serpentine, TwoByTwo) {
  const CoveragePath p = serpentine_path(2, 2);
  EXPECT_EQ(p, (CoveragePath{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}));
}

TEST(Serpentine, FiveByFiveTransitions) {
  const CoveragePath p = serpentine_path(5, 5);
  EXPECT_EQ(p.size() - 1, 24u);
  EXPECT_TRUE(is_complete_coverage(p, 5, 5));
  EXPECT_EQ(p[5], (Cell{4, 1, 0}));  // second row runs right to left
}

TEST(Serpentine, CompleteForManyShapes) {
  for (int w = 1; w <= 7; ++w) {
    for (int h = 1; h <= 7; ++h) EXPECT_TRUE(is_complete_coverage(serpentine_path(w, h), w, h)) << w << "x" << h;
  }
}

TEST(Serpentine, ZeroDimension) {
  EXPECT_THROW(serpentine_path(0, 3), ConfigError);
  EXPECT_THROW(serpentine_path(3, 0), ConfigError);
}

TEST(CoverageCheck, RejectsBrokenPaths) {
  EXPECT_TRUE(is_complete_coverage({{0, 0, 0}, {1, 1, 0}, {0, 1, 0}, {1, 0, 0}}, 2, 2));
  EXPECT_FALSE(is_complete_coverage({{0, 0, 0}, {0, 0, 0}, {1, 1, 0}, {0, 1, 0}}, 2, 2));
  EXPECT_FALSE(is_complete_coverage({{0, 0, 0}, {2, 0, 0}, {1, 0, 0}}, 3, 1));
}

TEST(Anchored, StartsAtEveryCorner) {
  EnvConfig c;
  c.world_width = 4;
  c.world_height = 3;
  for (const Cell start : {Cell{0, 0, 0}, Cell{3, 0, 0}, Cell{0, 2, 0}, Cell{3, 2, 0}}) {
    c.start_cell = start;
    const CoveragePath p = anchored_serpentine(c);
    EXPECT_EQ(p.front(), start);
    EXPECT_TRUE(is_complete_coverage(p, 4, 3));
    EXPECT_EQ(p[1].y, start.y);  // first leg runs along x
  }
  c.start_cell = {1, 0, 0};
  EXPECT_THROW(anchored_serpentine(c), ConfigError);
}

TEST(RunCoverage, ZeroWindConstantTableDepletesAfterElevenSteps) {
  EnvConfig c;
  c.world_width = 5;
  c.world_height = 5;
  c.n_goals = 1;
  c.goal_cells = {{2, 4, 0}};
  c.drag_table = DragTable::constant(1.0);
  const EpisodeTrace t = run_coverage(c, anchored_serpentine(c), 2);
  const double axis = 18.5 * (22.0 / 32.0) * (22.0 / 32.0);
  ASSERT_EQ(t.terminal, TerminalReason::BatteryDepleted);
  EXPECT_EQ(t.step_count(), static_cast<std::size_t>(std::floor(100.0 / axis)) + 1);
  EXPECT_EQ(std::floor(100.0 / axis), 11.0);
}

TEST(RunCoverage, HeadwindRowDepletesAfterFive) {
  EnvConfig c;
  c.world_width = 8;
  c.world_height = 1;
  c.n_goals = 1;
  c.goal_cells = {{0, 0, 0}};
  c.start_cell = {7, 0, 0};
  const EpisodeTrace t = run_coverage(c, anchored_serpentine(c), 4);
  ASSERT_EQ(t.terminal, TerminalReason::BatteryDepleted);
  int completed = 0;
  for (const auto& s : t.steps) completed += s.battery > 0.0;
  EXPECT_EQ(completed, 5);
}

TEST(RunCoverage, UnlimitedBatteryFindsEveryCenterGoal) {
  EnvConfig c;
  c.world_width = 5;
  c.world_height = 5;
  c.n_goals = 24;  // every cell but the start
  c.unlimited_battery = true;
  const EpisodeTrace t = run_coverage(c, anchored_serpentine(c), 4);
  EXPECT_EQ(t.detections, 24);
  EXPECT_EQ(t.terminal, TerminalReason::AllGoalsFound);
}

TEST(RunCoverage, PathEndWithoutTerminal) {
  EnvConfig c;
  c.world_width = 3;
  c.world_height = 1;
  c.n_goals = 1;
  c.goal_cells = {{0, 0, 0}};
  c.start_cell = {2, 0, 0};
  c.goal_radius_min = c.goal_radius_max = 0.01;
  const EpisodeTrace t = run_coverage(c, anchored_serpentine(c), 2);
  EXPECT_FALSE(t.terminal.has_value());
  EXPECT_EQ(t.step_count(), 2u);
}

TEST(RunCoverage, RejectsForeignPath) {
  EnvConfig c;
  c.n_goals = 1;
  c.goal_cells = {{1, 1, 0}};
  EXPECT_THROW(run_coverage(c, {{1, 0, 0}, {2, 0, 0}}, 2), ContractViolation);
  EXPECT_THROW(run_coverage(c, {{0, 0, 0}, {2, 0, 0}}, 2), ContractViolation);
}

#include <gtest/gtest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <sstream>

#include "windgrid/errors.hpp"
#include "windgrid/power_model.hpp"

using namespace windgrid;
using std::numbers::pi;

namespace {

// c_d rising with node index so every node is distinct
DragTable ramp_table() {
  Eigen::MatrixXd cd(8, 5);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 5; ++j) cd(i, j) = 0.5 + 0.1 * i + 0.03 * j;
  }
  return DragTable(DragTable::default_theta_samples(), DragTable::default_speed_samples(), cd);
}

PowerParams unit_cell() {
  PowerParams p;
  p.cell_size = 1.0;
  return p;
}

}  // namespace

TEST(DragCoefficient, NodeIdentity) {
  const DragTable t = ramp_table();
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 5; ++j) {
      EXPECT_DOUBLE_EQ(drag_coefficient(t, i * pi / 4, t.speed_samples()(j)), t.cd_values()(i, j));
    }
  }
}

TEST(DragCoefficient, ThetaMidpoint) {
  const DragTable t = ramp_table();
  EXPECT_NEAR(drag_coefficient(t, pi / 8, 22.0), (t.cd_values()(0, 2) + t.cd_values()(1, 2)) / 2, 1e-12);
}

TEST(DragCoefficient, WrapAroundMidpoint) {
  const DragTable t = ramp_table();
  EXPECT_NEAR(drag_coefficient(t, 2 * pi - pi / 8, 17.0), (t.cd_values()(7, 1) + t.cd_values()(0, 1)) / 2, 1e-12);
  EXPECT_NEAR(drag_coefficient(t, -pi / 8, 17.0), (t.cd_values()(7, 1) + t.cd_values()(0, 1)) / 2, 1e-12);
}

TEST(DragCoefficient, SpeedClamped) {
  const DragTable t = ramp_table();
  EXPECT_DOUBLE_EQ(drag_coefficient(t, 0.0, 0.0), t.cd_values()(0, 0));
  EXPECT_DOUBLE_EQ(drag_coefficient(t, 0.0, 90.0), t.cd_values()(0, 4));
}

TEST(DragCoefficient, Bilinear) {
  const DragTable t = ramp_table();
  // ramp is affine in (index, speed) so bilinear reproduces it
  const double theta = 2.5 * pi / 4, speed = 19.5;
  EXPECT_NEAR(drag_coefficient(t, theta, speed), 0.5 + 0.1 * 2.5 + 0.03 * 1.5, 1e-12);
}

TEST(DragTable, RejectsBadInput) {
  EXPECT_THROW(DragTable(DragTable::default_theta_samples(), DragTable::default_speed_samples(),
                         Eigen::MatrixXd::Zero(8, 5)),
               ConfigError);
  EXPECT_THROW(DragTable(Eigen::VectorXd::LinSpaced(7, 0, 6), DragTable::default_speed_samples(),
                         Eigen::MatrixXd::Ones(7, 5)),
               ConfigError);
  Eigen::VectorXd speeds(3);
  speeds << 12, 12, 20;
  EXPECT_THROW(DragTable(DragTable::default_theta_samples(), speeds, Eigen::MatrixXd::Ones(8, 3)), ConfigError);
}

TEST(DragTableCsv, RoundTrip) {
  const DragTable t = ramp_table();
  std::istringstream in(to_csv(t));
  const DragTable back = parse_drag_table_csv(in);
  EXPECT_TRUE(back.cd_values().isApprox(t.cd_values(), 1e-15));
  EXPECT_TRUE(back.speed_samples().isApprox(t.speed_samples()));
  EXPECT_EQ(to_csv(back), to_csv(t));
}

TEST(DragTableCsv, ErrorsNameTheLine) {
  std::istringstream bad("theta_deg,v_rel_mps,c_d\n0,12,1\n45,12,abc\n");
  try {
    parse_drag_table_csv(bad, "table.csv");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("table.csv:3"), std::string::npos) << e.what();
  }
}

TEST(DragTableCsv, RequiresEightThetas) {
  std::ostringstream csv;
  csv << "theta_deg,v_rel_mps,c_d\n";
  for (int i = 0; i < 7; ++i) csv << i * 45 << ",12,1\n" << i * 45 << ",32,1\n";
  std::istringstream in(csv.str());
  EXPECT_THROW(parse_drag_table_csv(in), ConfigError);
}

TEST(DragTableCsv, RejectsWrongHeader) {
  std::istringstream in("theta,v,c\n0,12,1\n");
  EXPECT_THROW(parse_drag_table_csv(in), ConfigError);
}

TEST(DragForce, Examples) {
  EXPECT_DOUBLE_EQ(drag_force(1.0, 2.0, 1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(drag_force(1.3, 1.225, 0.0, 0.1), 0.0);
  EXPECT_NEAR(drag_force(1.2, 1.225, 32.0, 0.1), 75.264, 1e-12);
}

TEST(DragForce, RoundTrip) {
  for (double c : {0.3, 1.0, 1.7}) {
    for (double v : {0.5, 12.0, 32.0}) {
      const double f = drag_force(c, 1.225, v, 0.1);
      EXPECT_NEAR(drag_coefficient_from_force(f, 1.225, v, 0.1), c, 1e-12);
    }
  }
}

TEST(Calibrate, ConstantTableScale) {
  const PowerParams p = calibrate(DragTable::constant(1.0), unit_cell(), 10.0);
  EXPECT_DOUBLE_EQ(p.scale_k, 18.5 / 1024.0);
}

TEST(Calibrate, DoublingTableHalvesScale) {
  const PowerParams a = calibrate(DragTable::constant(1.0), unit_cell(), 10.0);
  const PowerParams b = calibrate(DragTable::constant(2.0), unit_cell(), 10.0);
  EXPECT_DOUBLE_EQ(b.scale_k, a.scale_k / 2);
  const DragTable r = ramp_table();
  const DragTable r2(r.theta_samples(), r.speed_samples(), 2.0 * r.cd_values());
  EXPECT_NEAR(calibrate(r2, unit_cell(), 10.0).scale_k, calibrate(r, unit_cell(), 10.0).scale_k / 2, 1e-15);
}

TEST(Calibrate, HeadwindCostIsAnchorForAnyTable) {
  for (const DragTable& t : {DragTable::constant(0.7), DragTable::synthetic_default(), ramp_table()}) {
    for (double cell : {1.0, 10.0, 30.0}) {
      PowerParams p = unit_cell();
      p.cell_size = cell;
      p = calibrate(t, p, 10.0);
      EXPECT_NEAR(step_power_cost({-1, 0, 0}, WindVector(10, 0), t, p), kWorstStepCost, 1e-12);
    }
  }
}

TEST(StepPowerCost, ZeroWindConstantTable) {
  const DragTable t = DragTable::constant(1.0);
  const PowerParams p = calibrate(t, unit_cell(), 10.0);
  const double axis = step_power_cost({1, 0, 0}, WindVector(0, 0), t, p);
  EXPECT_NEAR(axis, 18.5 * (22.0 / 32.0) * (22.0 / 32.0), 1e-12);
  EXPECT_NEAR(axis, 8.744, 5e-4);
  EXPECT_NEAR(step_power_cost({1, 1, 0}, WindVector(0, 0), t, p), std::sqrt(2.0) * axis, 1e-12);
}

TEST(StepPowerCost, VerticalCosts) {
  const DragTable t = DragTable::synthetic_default();
  const PowerParams p = calibrate(t, unit_cell(), 10.0);
  EXPECT_DOUBLE_EQ(step_power_cost({0, 0, 1}, WindVector(10, 0), t, p), 3.0);
  EXPECT_DOUBLE_EQ(step_power_cost({0, 0, -1}, WindVector(-10, 0), t, p), 1.0);
}

TEST(StepPowerCost, MonotoneInOpposingWind) {
  for (const DragTable& t : {DragTable::constant(1.0), DragTable::synthetic_default()}) {
    const PowerParams p = calibrate(t, unit_cell(), 10.0);
    double prev = 0.0;
    for (double w = -10.0; w <= 10.0; w += 0.5) {
      // moving -x, wind +x opposes
      const double c = step_power_cost({-1, 0, 0}, WindVector(w, 0), t, p);
      EXPECT_GT(c, prev) << "w=" << w;
      prev = c;
    }
  }
}

TEST(StepPowerCost, HeadwindStepsPerBattery) {
  const DragTable t = DragTable::synthetic_default();
  const PowerParams p = calibrate(t, unit_cell(), 10.0);
  const double c = step_power_cost({-1, 0, 0}, WindVector(10, 0), t, p);
  int steps = 0;
  for (double b = 100.0; b - c >= 0.0; b -= c) ++steps;
  EXPECT_EQ(steps, 5);
}

TEST(StepPowerCost, RotationByEighthTurns) {
  const DragTable t = DragTable::synthetic_default();  // depends on theta only through cos
  const PowerParams p = calibrate(t, unit_cell(), 10.0);
  const int dirs[8][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
  const WindVector w(4.0, -7.0);
  for (int k = 0; k < 8; ++k) {
    const Eigen::Rotation2D<double> rot(k * pi / 4);
    for (int d = 0; d < 8; d += 2) {  // axis moves rotate onto axis or diagonal
      const auto& m = dirs[d];
      const auto& r = dirs[(d + k) % 8];
      const double base = step_power_cost({m[0], m[1], 0}, w, t, p);
      const double rotated = step_power_cost({r[0], r[1], 0}, WindVector(rot * w), t, p);
      const double leg_ratio = (k % 2 == 0) ? 1.0 : std::sqrt(2.0);
      EXPECT_NEAR(rotated, leg_ratio * base, 1e-9 * base);
    }
  }
}

TEST(PowerParams, Validate) {
  PowerParams p;
  p.rho = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = PowerParams{};
  p.descend_cost = 0.0;
  EXPECT_NO_THROW(p.validate());
}

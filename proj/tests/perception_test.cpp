#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "windgrid/errors.hpp"
#include "windgrid/perception.hpp"

using namespace windgrid;

TEST(Camera, FocalFromFov) {
  const CameraModel cam = CameraModel::from_horizontal_fov(std::numbers::pi / 2);
  EXPECT_NEAR(cam.f_x, 128.0, 1e-12);
  EXPECT_NEAR(cam.f_y, 128.0, 1e-12);
  EXPECT_DOUBLE_EQ(cam.c_x, 128.0);
  EXPECT_DOUBLE_EQ(cam.c_y, 72.0);
}

TEST(Camera, ValidateRejectsOffCenterPrincipalPoint) {
  CameraModel cam;
  cam.c_x = 100;
  EXPECT_THROW(cam.validate(), ConfigError);
  cam = CameraModel{};
  cam.min_blob_px = 0.5;
  EXPECT_THROW(cam.validate(), ConfigError);
}

TEST(Footprint, HandValues) {
  const GroundRect r = footprint({0, 0, 10}, CameraModel{});
  EXPECT_DOUBLE_EQ(r.half_width(), 10.0);
  EXPECT_DOUBLE_EQ(r.half_height(), 5.625);
}

TEST(Footprint, UnitTangentWhenFocalEqualsHalfWidth) {
  const GroundRect r = footprint({3, 4, 7.5}, CameraModel{});
  EXPECT_DOUBLE_EQ(r.half_width(), 7.5);
  EXPECT_DOUBLE_EQ((r.min_x + r.max_x) / 2, 3.0);
  EXPECT_DOUBLE_EQ((r.min_y + r.max_y) / 2, 4.0);
}

TEST(Footprint, ScalesWithAltitude) {
  const GroundRect a = footprint({0, 0, 6}, CameraModel{});
  const GroundRect b = footprint({0, 0, 12}, CameraModel{});
  EXPECT_DOUBLE_EQ(b.half_width(), 2 * a.half_width());
  EXPECT_DOUBLE_EQ(b.half_height(), 2 * a.half_height());
}

TEST(Footprint, EmptyAtOrBelowGround) {
  EXPECT_TRUE(footprint({0, 0, 0}, CameraModel{}).empty);
  EXPECT_TRUE(footprint({0, 0, -2}, CameraModel{}).empty);
  EXPECT_FALSE(footprint({0, 0, 0}, CameraModel{}).contains(0, 0));
}

TEST(GlobalLabel, PrincipalPoint) {
  const CameraModel cam;
  const Eigen::Vector2d o = global_label({5, -3, 20}, {cam.c_x, cam.c_y}, cam);
  EXPECT_DOUBLE_EQ(o.x(), 5.0);
  EXPECT_DOUBLE_EQ(o.y(), -3.0);
}

TEST(GlobalLabel, ZeroAltitudeDropsOffset) {
  const Eigen::Vector2d o = global_label({5, -3, 0}, {10, 140}, CameraModel{});
  EXPECT_DOUBLE_EQ(o.x(), 5.0);
  EXPECT_DOUBLE_EQ(o.y(), -3.0);
}

TEST(GlobalLabel, HandValue) {
  EXPECT_DOUBLE_EQ(global_label({2, 0, 10}, {192, 72}, CameraModel{}).x(), 7.0);
}

TEST(GlobalLabel, RoundTripWithinOnePixel) {
  const CameraModel cam;
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> pos(-100, 100), alt(1, 60), unit(-1, 1);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Vector3d drone(pos(gen), pos(gen), alt(gen));
    const GroundRect r = footprint(drone, cam);
    const Eigen::Vector2d goal(drone.x() + unit(gen) * r.half_width() * 0.999,
                               drone.y() + unit(gen) * r.half_height() * 0.999);
    const Eigen::Vector2d label = global_label(drone, project_to_centroid(drone, goal, cam), cam);
    EXPECT_LE((label - goal).cwiseAbs().maxCoeff(), drone.z() / cam.f_x);
  }
}

TEST(Registry, Basics) {
  DetectionRegistry reg(5.0);
  EXPECT_TRUE(reg.insert({1, 1}));
  EXPECT_FALSE(reg.insert({1, 1}));
  EXPECT_FALSE(reg.insert({1 + 0.9 * 5.0, 1}));
  EXPECT_TRUE(reg.insert({1 + 1.1 * 5.0, 1}));
  EXPECT_EQ(reg.size(), 2u);
  EXPECT_TRUE(reg.contains_near({1.2, 0.8}));
  reg.clear();
  EXPECT_EQ(reg.size(), 0u);
  EXPECT_TRUE(reg.insert({1, 1}));
}

TEST(Detect, OnceThenSilent) {
  DetectionRegistry reg(5.0);
  const std::vector<GoalObject> goals{{10, 10, 2.0, 0}};
  EXPECT_EQ(detect({10, 10, 4}, CameraModel{}, goals, reg).size(), 1u);
  EXPECT_TRUE(detect({10, 10, 4}, CameraModel{}, goals, reg).empty());
  EXPECT_TRUE(detect({11, 10, 5}, CameraModel{}, goals, reg).empty());
}

TEST(Detect, OutsideFootprint) {
  DetectionRegistry reg(5.0);
  const std::vector<GoalObject> goals{{30, 10, 2.0, 0}};
  EXPECT_TRUE(detect({10, 10, 4}, CameraModel{}, goals, reg).empty());
}

TEST(Detect, SizeThresholdCrossing) {
  const CameraModel cam;
  const std::vector<GoalObject> goals{{0, 0, 0.3, 0}};
  DetectionRegistry a(5.0), b(5.0);
  EXPECT_NEAR(projected_diameter_px(0.3, 15, cam), 5.12, 1e-12);
  EXPECT_NEAR(projected_diameter_px(0.3, 25, cam), 3.072, 1e-12);
  EXPECT_EQ(detect({0, 0, 15}, cam, goals, a).size(), 1u);
  EXPECT_TRUE(detect({0, 0, 25}, cam, goals, b).empty());
}

TEST(Detect, MonotoneInRadius) {
  const CameraModel cam;
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> r(0.05, 1.5), h(1, 60), off(-20, 20);
  for (int i = 0; i < 500; ++i) {
    const Eigen::Vector3d drone(0, 0, h(gen));
    const double gx = off(gen), gy = off(gen), r0 = r(gen);
    DetectionRegistry a(0.1), b(0.1);
    const std::vector<GoalObject> small{{gx, gy, r0, 0}}, large{{gx, gy, r0 * 1.5, 0}};
    if (!detect(drone, cam, small, a).empty()) EXPECT_FALSE(detect(drone, cam, large, b).empty());
  }
}

TEST(Detect, NoDetectionAtGroundLevel) {
  DetectionRegistry reg(5.0);
  const std::vector<GoalObject> goals{{0, 0, 1.0, 0}};
  EXPECT_TRUE(detect({0, 0, 0}, CameraModel{}, goals, reg).empty());
}

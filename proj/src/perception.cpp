#include "windgrid/perception.hpp"

#include <algorithm>
#include <cmath>

#include "windgrid/errors.hpp"

namespace windgrid {

CameraModel CameraModel::from_horizontal_fov(double fov_rad, int image_w, int image_h) {
  CameraModel cam;
  cam.image_w = image_w;
  cam.image_h = image_h;
  cam.c_x = image_w / 2.0;
  cam.c_y = image_h / 2.0;
  cam.f_x = image_w / (2.0 * std::tan(fov_rad / 2.0));
  cam.f_y = cam.f_x;
  return cam;
}

void CameraModel::validate() const {
  if (image_w <= 0 || image_h <= 0) throw ConfigError("camera: image size must be positive");
  if (c_x != image_w / 2.0 || c_y != image_h / 2.0) throw ConfigError("camera: principal point must be the image center");
  if (!(f_x > 0) || !(f_y > 0)) throw ConfigError("camera: focal lengths must be positive");
  if (!(x_scale > 0) || !(y_scale > 0) || !(z_scale > 0)) throw ConfigError("camera: scales must be positive");
  if (!(min_blob_px >= 1)) throw ConfigError("camera: min_blob_px must be >= 1");
}

GroundRect footprint(const Eigen::Vector3d& drone, const CameraModel& cam) {
  const double h = drone.z();
  if (!(h > 0)) return {};
  const double half_w = h * cam.c_x / cam.f_x;
  const double half_h = h * cam.c_y / cam.f_y;
  return {drone.x() - half_w, drone.x() + half_w, drone.y() - half_h, drone.y() + half_h, false};
}

Eigen::Vector2d project_to_centroid(const Eigen::Vector3d& drone, const Eigen::Vector2d& ground,
                                    const CameraModel& cam) {
  const double depth = drone.z() * cam.z_scale;
  const double x_f = cam.c_x + (ground.x() - drone.x() * cam.x_scale) * cam.f_x / depth;
  const double y_f = cam.c_y + (ground.y() - drone.y() * cam.y_scale) * cam.f_y / depth;
  const auto pixel_center = [](double v, int extent) {
    return std::clamp(std::floor(v), 0.0, static_cast<double>(extent - 1)) + 0.5;
  };
  return {pixel_center(x_f, cam.image_w), pixel_center(y_f, cam.image_h)};
}

Eigen::Vector2d global_label(const Eigen::Vector3d& drone, const Eigen::Vector2d& centroid,
                             const CameraModel& cam) {
  const double h = std::max(drone.z(), 0.0);
  return {drone.x() * cam.x_scale + (centroid.x() - cam.c_x) * (h * cam.z_scale) / cam.f_x,
          drone.y() * cam.y_scale + (centroid.y() - cam.c_y) * (h * cam.z_scale) / cam.f_y};
}

DetectionRegistry::DetectionRegistry(double merge_radius) : merge_radius_(merge_radius) {
  if (!(merge_radius > 0)) throw ConfigError("detection registry: merge radius must be positive");
}

bool DetectionRegistry::contains_near(const Eigen::Vector2d& label) const {
  return std::any_of(labels_.begin(), labels_.end(),
                     [&](const Eigen::Vector2d& l) { return (l - label).norm() < merge_radius_; });
}

bool DetectionRegistry::insert(const Eigen::Vector2d& label) {
  if (contains_near(label)) return false;
  labels_.push_back(label);
  return true;
}

std::vector<GoalObject> detect(const Eigen::Vector3d& drone, const CameraModel& cam,
                               std::span<const GoalObject> goals, DetectionRegistry& registry) {
  std::vector<GoalObject> found;
  const GroundRect view = footprint(drone, cam);
  if (view.empty) return found;
  for (const GoalObject& goal : goals) {
    if (!view.contains(goal.gx, goal.gy)) continue;
    if (projected_diameter_px(goal.radius, drone.z(), cam) < cam.min_blob_px) continue;
    const Eigen::Vector2d centroid = project_to_centroid(drone, {goal.gx, goal.gy}, cam);
    if (registry.insert(global_label(drone, centroid, cam))) found.push_back(goal);
  }
  return found;
}

}  // namespace windgrid

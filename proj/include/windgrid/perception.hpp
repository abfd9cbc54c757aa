#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

namespace windgrid {

/// Downward-looking pinhole camera. Axes of the image are aligned with the
/// world axes (gimbal held level, yaw 0).
struct CameraModel {
  int image_w = 256;
  int image_h = 144;
  double c_x = 128.0;
  double c_y = 72.0;
  double f_x = 128.0;
  double f_y = 128.0;
  double x_scale = 1.0;
  double y_scale = 1.0;
  double z_scale = 1.0;
  double min_blob_px = 4.0;  ///< smallest projected diameter that segments reliably

  /// Square pixels, principal point at the image center, focal length from
  /// the horizontal field of view.
  static CameraModel from_horizontal_fov(double fov_rad, int image_w = 256, int image_h = 144);

  void validate() const;
};

struct GoalObject {
  double gx = 0.0;      ///< ground x (m)
  double gy = 0.0;      ///< ground y (m)
  double radius = 0.5;  ///< m
  int id = 0;
};

/// Axis-aligned ground rectangle seen by the camera.
struct GroundRect {
  double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
  bool empty = true;

  bool contains(double x, double y) const {
    return !empty && x >= min_x && x <= max_x && y >= min_y && y <= max_y;
  }
  double half_width() const { return empty ? 0.0 : (max_x - min_x) / 2.0; }
  double half_height() const { return empty ? 0.0 : (max_y - min_y) / 2.0; }
};

/// `drone` is (X_G, Y_G, h) with h the height above ground.
GroundRect footprint(const Eigen::Vector3d& drone, const CameraModel& cam);

/// Pixel centroid of a ground point, quantized to the center of the pixel it
/// falls in and clamped to the image.
Eigen::Vector2d project_to_centroid(const Eigen::Vector3d& drone, const Eigen::Vector2d& ground,
                                    const CameraModel& cam);

/// Global label (O_x, O_y) of an object seen at pixel `centroid`:
///   O_x = X_G * x_scale + (x_f - c_x) * h * z_scale / f_x
/// and likewise for y. At h <= 0 the height term vanishes.
Eigen::Vector2d global_label(const Eigen::Vector3d& drone, const Eigen::Vector2d& centroid,
                             const CameraModel& cam);

/// Deduplicated set of global labels. Single writer; reset per episode.
class DetectionRegistry {
 public:
  explicit DetectionRegistry(double merge_radius = 0.5);

  /// Stores `label` and returns true iff no stored label lies within
  /// merge_radius of it.
  bool insert(const Eigen::Vector2d& label);
  bool contains_near(const Eigen::Vector2d& label) const;

  void clear() { labels_.clear(); }
  std::size_t size() const { return labels_.size(); }
  double merge_radius() const { return merge_radius_; }
  std::span<const Eigen::Vector2d> labels() const { return labels_; }

 private:
  double merge_radius_;
  std::vector<Eigen::Vector2d> labels_;
};

/// Projected diameter (px) of a ball of `radius` seen from height `h`.
inline double projected_diameter_px(double radius, double h, const CameraModel& cam) {
  return 2.0 * radius * cam.f_x / h;
}

/// Goals newly detected from `drone`: inside the footprint, large enough to
/// segment, and labelled at a location the registry has not seen. Newly
/// detected goals are registered.
std::vector<GoalObject> detect(const Eigen::Vector3d& drone, const CameraModel& cam,
                               std::span<const GoalObject> goals, DetectionRegistry& registry);

}  // namespace windgrid

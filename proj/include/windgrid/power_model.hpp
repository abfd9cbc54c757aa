#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "windgrid/kinematics.hpp"

namespace windgrid {

/// Drag coefficient samples over relative flow angle x relative airspeed.
///
/// Rows are the 8 flow angles (radians, strictly increasing, spanning less
/// than one turn), columns the airspeed samples (m/s, strictly increasing).
/// Immutable once constructed.
class DragTable {
 public:
  DragTable(Eigen::VectorXd theta_samples, Eigen::VectorXd speed_samples, Eigen::MatrixXd cd_values);

  /// The five relative airspeeds a 22 m/s vehicle sees under |W| <= 10 m/s.
  static Eigen::VectorXd default_speed_samples();
  static Eigen::VectorXd default_theta_samples();

  /// Same c_d everywhere.
  static DragTable constant(double cd);

  /// c_d = 1 - 0.25 cos(theta_rel): 1.25 for head-on flow (theta_rel = pi),
  /// 0.75 for flow from behind.
  static DragTable synthetic_default();

  const Eigen::VectorXd& theta_samples() const { return theta_; }
  const Eigen::VectorXd& speed_samples() const { return speed_; }
  const Eigen::MatrixXd& cd_values() const { return cd_; }

  static constexpr int kThetaCount = 8;

 private:
  Eigen::VectorXd theta_;
  Eigen::VectorXd speed_;
  Eigen::MatrixXd cd_;
};

/// Parses the `theta_deg,v_rel_mps,c_d` CSV form. Every (theta, speed) pair
/// must appear exactly once and there must be exactly 8 distinct thetas.
/// Errors are ConfigError naming `source` and the offending line.
DragTable parse_drag_table_csv(std::istream& in, std::string_view source = "<drag table>");
DragTable load_drag_table_csv(const std::filesystem::path& path);

/// Canonical CSV rendering (round-trips through parse_drag_table_csv).
std::string to_csv(const DragTable& table);

/// Bilinear lookup; theta wraps at 2pi, speed is clamped to the sampled range.
double drag_coefficient(const DragTable& table, double theta_rel, double speed);

/// F_d = c_d * rho * v^2 * A / 2
template <typename Scalar>
Scalar drag_force(Scalar cd, Scalar rho, Scalar speed, Scalar area) {
  return cd * rho * speed * speed * area / Scalar(2);
}

/// c_d = 2 F_d / (rho v^2 A)
template <typename Scalar>
Scalar drag_coefficient_from_force(Scalar force, Scalar rho, Scalar speed, Scalar area) {
  return Scalar(2) * force / (rho * speed * speed * area);
}

struct PowerParams {
  double rho = 1.225;          ///< air density (kg/m^3)
  double area = 0.1;           ///< reference area (m^2)
  double cell_size = 1.0;      ///< lateral leg length for axis moves (m)
  double ground_speed = 22.0;  ///< constant ground speed along a leg (m/s)
  // Battery units per (c_d * v_air^2 * meter). rho*A/2 is folded in here.
  double scale_k = 1.0;
  double climb_cost = 3.0;    ///< battery units per altitude level up
  double descend_cost = 1.0;  ///< battery units per altitude level down

  void validate() const;
};

/// One grid move. Lateral components are in {-1, 0, 1}; dz is 0 for lateral
/// moves and +-1 for vertical ones.
struct MoveDirection {
  int dx = 0;
  int dy = 0;
  int dz = 0;

  bool is_vertical() const { return dz != 0; }
  bool is_diagonal() const { return dx != 0 && dy != 0; }
  friend bool operator==(const MoveDirection&, const MoveDirection&) = default;
};

/// Battery cost of one grid move under a constant wind.
double step_power_cost(const MoveDirection& move, const WindVector& wind, const DragTable& table,
                       const PowerParams& params);

/// Anchor value: cost of one axis leg flown straight into a w_max headwind.
inline constexpr double kWorstStepCost = 18.5;

/// Returns `params` with scale_k chosen so the pure-headwind axis leg at
/// `w_max` costs exactly kWorstStepCost.
PowerParams calibrate(const DragTable& table, PowerParams params, double w_max);

}  // namespace windgrid

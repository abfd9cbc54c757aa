#pragma once

#include <Eigen/Core>
#include <cmath>
#include <numbers>

namespace windgrid {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

/// Wind as an air-mass velocity (m/s), i.e. the direction the air moves.
using WindVector = Vector2<double>;

template <typename Scalar>
struct Pose {
  Scalar x_g{0};  ///< global X (m)
  Scalar y_g{0};  ///< global Y (m)
  Scalar psi{0};  ///< heading (rad), kept in [0, 2pi)
};

template <typename Scalar>
struct TurnCommand {
  Scalar u{0};      ///< normalized turn rate in [-1, 1]
  Scalar v_air{0};  ///< commanded airspeed (m/s)
  Scalar r_min{1};  ///< minimum turning radius (m)
};

template <typename Scalar>
struct AirRelativeState {
  Scalar speed{0};      ///< |v_ground - wind| (m/s)
  Scalar theta_rel{0};  ///< wind direction measured from ground track, [0, 2pi)
};

/// Below this |u| the closed-form turn divides by ~0; the straight-line
/// limit is used instead.
inline constexpr double kTurnEpsilon = 1e-6;

template <typename Scalar>
Scalar wrap_angle(Scalar angle) {
  constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  Scalar wrapped = std::fmod(angle, two_pi);
  if (wrapped < Scalar(0)) wrapped += two_pi;
  if (wrapped >= two_pi) wrapped = Scalar(0);
  return wrapped;
}

/// Ground velocity of a vehicle flying heading `psi` at airspeed `v_air`
/// through wind `wind`.
template <typename Scalar>
Vector2<Scalar> ground_velocity(Scalar psi, Scalar v_air, const Vector2<Scalar>& wind) {
  return Vector2<Scalar>(v_air * std::cos(psi), v_air * std::sin(psi)) + wind;
}

/// Closed-form pose after flying a constant-rate turn for `t` seconds.
///
/// Heading advances as psi0 + (v_air / r_min) * u * t. Position is the exact
/// integral of ground_velocity along that heading, anchored so that t = 0
/// returns `p0`. The sine/cosine differences are evaluated in product form
/// to avoid cancellation for small turn rates.
template <typename Scalar>
Pose<Scalar> pose_at_time(const Pose<Scalar>& p0, const TurnCommand<Scalar>& cmd,
                          const Vector2<Scalar>& wind, Scalar t) {
  const Scalar turn_rate = cmd.v_air / cmd.r_min * cmd.u;
  const Scalar dpsi = turn_rate * t;

  Pose<Scalar> out;
  out.psi = wrap_angle(p0.psi + dpsi);
  if (std::abs(cmd.u) < Scalar(kTurnEpsilon)) {
    out.x_g = p0.x_g + (cmd.v_air * std::cos(p0.psi) + wind.x()) * t;
    out.y_g = p0.y_g + (cmd.v_air * std::sin(p0.psi) + wind.y()) * t;
    return out;
  }
  const Scalar radius = cmd.r_min / cmd.u;
  const Scalar mid = p0.psi + dpsi / Scalar(2);
  const Scalar chord = Scalar(2) * std::sin(dpsi / Scalar(2));
  // sin(a + d) - sin(a) = 2 cos(a + d/2) sin(d/2); cos(a + d) - cos(a) = -2 sin(a + d/2) sin(d/2)
  out.x_g = p0.x_g + radius * std::cos(mid) * chord + wind.x() * t;
  out.y_g = p0.y_g + radius * std::sin(mid) * chord + wind.y() * t;
  return out;
}

/// Air-relative speed and flow angle for a ground velocity under wind.
/// theta_rel is the wind direction relative to the ground track: 0 for a
/// pure tailwind, pi for a pure headwind, and 0 by convention in still air.
template <typename Scalar>
AirRelativeState<Scalar> relative_air_velocity(const Vector2<Scalar>& v_ground,
                                               const Vector2<Scalar>& wind) {
  AirRelativeState<Scalar> out;
  out.speed = (v_ground - wind).norm();
  if (wind.squaredNorm() == Scalar(0)) return out;
  const Scalar track = std::atan2(v_ground.y(), v_ground.x());
  const Scalar wind_dir = std::atan2(wind.y(), wind.x());
  out.theta_rel = wrap_angle(wind_dir - track);
  return out;
}

}  // namespace windgrid

#include "windgrid/power_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>
#include <vector>

#include "windgrid/errors.hpp"

namespace windgrid {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_strictly_increasing(const Eigen::VectorXd& v, const char* what) {
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) throw ConfigError(std::string("drag table: ") + what + " must be strictly increasing");
  }
}

// Locate `x` within sorted `samples`: returns lower index and the
// interpolation weight of the upper neighbour. Assumes x already clamped.
std::pair<Eigen::Index, double> bracket(const Eigen::VectorXd& samples, double x) {
  const Eigen::Index n = samples.size();
  if (n == 1 || x <= samples[0]) return {0, 0.0};
  if (x >= samples[n - 1]) return {n - 2, 1.0};
  const auto* begin = samples.data();
  const auto* it = std::upper_bound(begin, begin + n, x);
  const Eigen::Index hi = it - begin;
  const Eigen::Index lo = hi - 1;
  return {lo, (x - samples[lo]) / (samples[hi] - samples[lo])};
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_number(const std::string& text, std::string_view source, int line_no, const char* column) {
  const std::string t = trim(text);
  try {
    std::size_t used = 0;
    const double value = std::stod(t, &used);
    if (used != t.size() || !std::isfinite(value)) throw std::invalid_argument("trailing");
    return value;
  } catch (const std::exception&) {
    std::ostringstream msg;
    msg << source << ":" << line_no << ": invalid " << column << " value '" << t << "'";
    throw ConfigError(msg.str());
  }
}

}  // namespace

DragTable::DragTable(Eigen::VectorXd theta_samples, Eigen::VectorXd speed_samples, Eigen::MatrixXd cd_values)
    : theta_(std::move(theta_samples)), speed_(std::move(speed_samples)), cd_(std::move(cd_values)) {
  if (theta_.size() != kThetaCount) throw ConfigError("drag table: exactly 8 theta samples are required");
  if (speed_.size() < 1) throw ConfigError("drag table: no speed samples");
  if (cd_.rows() != theta_.size() || cd_.cols() != speed_.size()) {
    throw ConfigError("drag table: c_d grid does not match the sample counts");
  }
  check_strictly_increasing(theta_, "theta samples");
  check_strictly_increasing(speed_, "speed samples");
  if (theta_[0] < 0.0 || theta_[theta_.size() - 1] >= kTwoPi) {
    throw ConfigError("drag table: theta samples must lie in [0, 2pi)");
  }
  if (speed_.minCoeff() < 0.0) throw ConfigError("drag table: negative speed sample");
  if (!cd_.allFinite() || cd_.minCoeff() <= 0.0) throw ConfigError("drag table: every c_d must be finite and > 0");
}

Eigen::VectorXd DragTable::default_speed_samples() {
  Eigen::VectorXd v(5);
  v << 12.0, 17.0, 22.0, 27.0, 32.0;
  return v;
}

Eigen::VectorXd DragTable::default_theta_samples() {
  return Eigen::VectorXd::LinSpaced(kThetaCount, 0.0, kTwoPi * (kThetaCount - 1) / kThetaCount);
}

DragTable DragTable::constant(double cd) {
  const Eigen::VectorXd speeds = default_speed_samples();
  return DragTable(default_theta_samples(), speeds, Eigen::MatrixXd::Constant(kThetaCount, speeds.size(), cd));
}

DragTable DragTable::synthetic_default() {
  const Eigen::VectorXd thetas = default_theta_samples();
  const Eigen::VectorXd speeds = default_speed_samples();
  const Eigen::VectorXd per_theta = (1.0 - 0.25 * thetas.array().cos()).matrix();
  return DragTable(thetas, speeds, per_theta.replicate(1, speeds.size()));
}

DragTable parse_drag_table_csv(std::istream& in, std::string_view source) {
  std::string line;
  int line_no = 0;
  bool have_header = false;
  // keyed on the raw degree values so duplicates are caught exactly
  std::map<double, std::map<double, double>> grid;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (!have_header) {
      if (trim(line) != "theta_deg,v_rel_mps,c_d") {
        std::ostringstream msg;
        msg << source << ":" << line_no << ": expected header 'theta_deg,v_rel_mps,c_d'";
        throw ConfigError(msg.str());
      }
      have_header = true;
      continue;
    }
    const auto fields = split_csv(line);
    if (fields.size() != 3) {
      std::ostringstream msg;
      msg << source << ":" << line_no << ": expected 3 fields, got " << fields.size();
      throw ConfigError(msg.str());
    }
    const double theta_deg = parse_number(fields[0], source, line_no, "theta_deg");
    const double speed = parse_number(fields[1], source, line_no, "v_rel_mps");
    const double cd = parse_number(fields[2], source, line_no, "c_d");
    auto fail = [&](const std::string& why) {
      std::ostringstream msg;
      msg << source << ":" << line_no << ": " << why;
      throw ConfigError(msg.str());
    };
    if (theta_deg < 0.0 || theta_deg >= 360.0) fail("theta_deg must be in [0, 360)");
    if (speed < 0.0) fail("v_rel_mps must be >= 0");
    if (cd <= 0.0) fail("c_d must be > 0");
    if (!grid[theta_deg].emplace(speed, cd).second) fail("duplicate (theta_deg, v_rel_mps) sample");
  }
  if (!have_header) throw ConfigError(std::string(source) + ": empty drag table");
  if (grid.size() != DragTable::kThetaCount) {
    std::ostringstream msg;
    msg << source << ": expected exactly 8 distinct theta values, found " << grid.size();
    throw ConfigError(msg.str());
  }
  const auto& first = grid.begin()->second;
  for (const auto& [theta, row] : grid) {
    bool same = row.size() == first.size();
    for (auto a = row.begin(), b = first.begin(); same && a != row.end(); ++a, ++b) same = a->first == b->first;
    if (!same) {
      std::ostringstream msg;
      msg << source << ": theta " << theta << " does not have the same speed samples as theta " << grid.begin()->first;
      throw ConfigError(msg.str());
    }
  }
  Eigen::VectorXd thetas(DragTable::kThetaCount);
  Eigen::VectorXd speeds(static_cast<Eigen::Index>(first.size()));
  Eigen::MatrixXd cd(thetas.size(), speeds.size());
  Eigen::Index i = 0;
  for (const auto& [theta, row] : grid) {
    thetas[i] = theta * std::numbers::pi / 180.0;
    Eigen::Index j = 0;
    for (const auto& [speed, value] : row) {
      speeds[j] = speed;
      cd(i, j) = value;
      ++j;
    }
    ++i;
  }
  return DragTable(thetas, speeds, cd);
}

DragTable load_drag_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open drag table '" + path.string() + "'");
  return parse_drag_table_csv(in, path.string());
}

std::string to_csv(const DragTable& table) {
  std::ostringstream out;
  out << "theta_deg,v_rel_mps,c_d\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < table.theta_samples().size(); ++i) {
    for (Eigen::Index j = 0; j < table.speed_samples().size(); ++j) {
      out << table.theta_samples()[i] * 180.0 / std::numbers::pi << ',' << table.speed_samples()[j] << ','
          << table.cd_values()(i, j) << '\n';
    }
  }
  return out.str();
}

double drag_coefficient(const DragTable& table, double theta_rel, double speed) {
  const Eigen::VectorXd& thetas = table.theta_samples();
  const Eigen::VectorXd& speeds = table.speed_samples();
  const Eigen::MatrixXd& cd = table.cd_values();

  // Angular bracket. The last interval wraps from the final sample to the
  // first sample + 2pi.
  double theta = wrap_angle(theta_rel);
  const Eigen::Index n = thetas.size();
  if (theta < thetas[0]) theta += kTwoPi;
  Eigen::Index lo = n - 1;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (theta >= thetas[i] && theta < thetas[i + 1]) {
      lo = i;
      break;
    }
  }
  const Eigen::Index hi = (lo + 1) % n;
  const double lo_theta = thetas[lo];
  const double hi_theta = hi == 0 ? thetas[0] + kTwoPi : thetas[hi];
  const double wt = (theta - lo_theta) / (hi_theta - lo_theta);

  const double clamped = std::clamp(speed, speeds[0], speeds[speeds.size() - 1]);
  const auto [s_lo, ws] = bracket(speeds, clamped);
  const Eigen::Index s_hi = speeds.size() == 1 ? 0 : s_lo + 1;

  const double at_lo = (1.0 - ws) * cd(lo, s_lo) + ws * cd(lo, s_hi);
  const double at_hi = (1.0 - ws) * cd(hi, s_lo) + ws * cd(hi, s_hi);
  return (1.0 - wt) * at_lo + wt * at_hi;
}

void PowerParams::validate() const {
  if (!(rho > 0) || !(area > 0) || !(cell_size > 0) || !(ground_speed > 0) || !(scale_k > 0) ||
      !(climb_cost > 0) || !(descend_cost >= 0)) {
    throw ConfigError("power parameters must be positive (descend_cost may be 0)");
  }
}

double step_power_cost(const MoveDirection& move, const WindVector& wind, const DragTable& table,
                       const PowerParams& params) {
  if (move.is_vertical()) return move.dz > 0 ? params.climb_cost : params.descend_cost;
  const Vector2<double> heading = Vector2<double>(move.dx, move.dy).normalized();
  const auto air = relative_air_velocity<double>(params.ground_speed * heading, wind);
  const double leg = move.is_diagonal() ? params.cell_size * std::numbers::sqrt2 : params.cell_size;
  return params.scale_k * drag_coefficient(table, air.theta_rel, air.speed) * air.speed * air.speed * leg;
}

PowerParams calibrate(const DragTable& table, PowerParams params, double w_max) {
  if (!(w_max >= 0)) throw ConfigError("calibration needs a non-negative W_max");
  const double speed = params.ground_speed + w_max;
  // headwind: wind opposes the track, theta_rel = pi (or 0 in still air)
  const double theta = w_max > 0 ? std::numbers::pi : 0.0;
  const double worst = drag_coefficient(table, theta, speed) * speed * speed * params.cell_size;
  if (!(worst > 0) || !std::isfinite(worst)) throw ConfigError("calibration: degenerate worst-case drag");
  params.scale_k = kWorstStepCost / worst;
  return params;
}

}  // namespace windgrid

#include "windgrid/scenario_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "windgrid/errors.hpp"

namespace windgrid {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view where, std::string_view key, std::string_view value,
                            std::string_view why) {
  std::ostringstream msg;
  msg << where << ": " << key << " = '" << value << "': " << why;
  throw ConfigError(msg.str());
}

template <typename Int>
Int parse_int(std::string_view where, std::string_view key, std::string_view value) {
  Int out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(where, key, value, "expected an integer");
  return out;
}

double parse_double(std::string_view where, std::string_view key, std::string_view value) {
  const std::string text(value);
  try {
    std::size_t used = 0;
    const double out = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(out)) throw std::invalid_argument("trailing");
    return out;
  } catch (const std::exception&) {
    bad_value(where, key, value, "expected a number");
  }
}

std::vector<Cell> parse_cells(std::string_view where, std::string_view key, std::string_view value) {
  std::vector<Cell> cells;
  std::string_view rest = value;
  while (!rest.empty()) {
    const auto semi = rest.find(';');
    const std::string_view item = trim(rest.substr(0, semi));
    rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) bad_value(where, key, value, "cells are written x:y");
    cells.push_back({parse_int<int>(where, key, trim(item.substr(0, colon))),
                     parse_int<int>(where, key, trim(item.substr(colon + 1))), 0});
  }
  return cells;
}

std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

}  // namespace

void apply_config_entry(EnvConfig& c, std::string_view key, std::string_view value, std::string_view where) {
  const auto as_int = [&] { return parse_int<int>(where, key, value); };
  const auto as_double = [&] { return parse_double(where, key, value); };
  if (key == "world_width") {
    c.world_width = as_int();
  } else if (key == "world_height") {
    c.world_height = as_int();
  } else if (key == "world_altitude") {
    c.world_altitude = as_int();
  } else if (key == "cell_size_m") {
    c.cell_size = as_double();
  } else if (key == "wind_max_mps") {
    c.wind_max = as_double();
    c.wind_set = EnvConfig::default_wind_set(c.wind_max);
  } else if (key == "n_goals") {
    c.n_goals = as_int();
  } else if (key == "c_r") {
    c.c_r = as_double();
  } else if (key == "charging_x" || key == "charging_y") {
    Cell station = c.charging_station.value_or(Cell{});
    (key == "charging_x" ? station.x : station.y) = as_int();
    c.charging_station = station;
  } else if (key == "start_x") {
    c.start_cell.x = as_int();
  } else if (key == "start_y") {
    c.start_cell.y = as_int();
  } else if (key == "relocation_period") {
    c.goal_relocation_period = as_int();
  } else if (key == "seed") {
    c.seed = parse_int<std::uint64_t>(where, key, value);
  } else if (key == "goal_placement") {
    if (value == "centers") {
      c.goal_placement = GoalPlacement::CellCenters;
    } else if (value == "continuous") {
      c.goal_placement = GoalPlacement::Continuous;
    } else {
      bad_value(where, key, value, "expected 'centers' or 'continuous'");
    }
  } else if (key == "goal_cells") {
    c.goal_cells = parse_cells(where, key, value);
  } else if (key == "goal_radius_min_m") {
    c.goal_radius_min = as_double();
  } else if (key == "goal_radius_max_m") {
    c.goal_radius_max = as_double();
  } else if (key == "base_altitude_m") {
    c.base_altitude = as_double();
  } else if (key == "altitude_step_m") {
    c.altitude_step = as_double();
  } else {
    std::ostringstream msg;
    msg << where << ": unknown key '" << key << "'";
    throw ConfigError(msg.str());
  }
}

EnvConfig parse_scenario_config(std::istream& in, EnvConfig base, std::string_view source) {
  std::set<std::string, std::less<>> seen;
  std::string line;
  int line_no = 0;
  bool charging_x = false, charging_y = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string_view key = trim(text.substr(0, eq));
    const std::string_view value = trim(text.substr(eq + 1));
    if (!seen.emplace(key).second) throw ConfigError(where + ": duplicate key '" + std::string(key) + "'");
    charging_x |= key == "charging_x";
    charging_y |= key == "charging_y";
    apply_config_entry(base, key, value, where);
  }
  if (charging_x != charging_y) throw ConfigError(std::string(source) + ": charging_x and charging_y go together");
  return base;
}

EnvConfig load_scenario_config(const std::filesystem::path& path, EnvConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  return parse_scenario_config(in, std::move(base), path.string());
}

std::string serialize_scenario_config(const EnvConfig& c) {
  std::ostringstream out;
  out << "world_width = " << c.world_width << '\n'
      << "world_height = " << c.world_height << '\n'
      << "world_altitude = " << c.world_altitude << '\n'
      << "cell_size_m = " << format_double(c.cell_size) << '\n'
      << "wind_max_mps = " << format_double(c.wind_max) << '\n'
      << "n_goals = " << c.n_goals << '\n'
      << "c_r = " << format_double(c.c_r) << '\n';
  if (c.charging_station) {
    out << "charging_x = " << c.charging_station->x << '\n' << "charging_y = " << c.charging_station->y << '\n';
  }
  out << "start_x = " << c.start_cell.x << '\n'
      << "start_y = " << c.start_cell.y << '\n'
      << "relocation_period = " << c.goal_relocation_period << '\n'
      << "seed = " << c.seed << '\n'
      << "goal_placement = " << (c.goal_placement == GoalPlacement::CellCenters ? "centers" : "continuous") << '\n';
  if (!c.goal_cells.empty()) {
    out << "goal_cells = ";
    for (std::size_t i = 0; i < c.goal_cells.size(); ++i) {
      out << (i ? ";" : "") << c.goal_cells[i].x << ':' << c.goal_cells[i].y;
    }
    out << '\n';
  }
  out << "goal_radius_min_m = " << format_double(c.goal_radius_min) << '\n'
      << "goal_radius_max_m = " << format_double(c.goal_radius_max) << '\n'
      << "base_altitude_m = " << format_double(c.base_altitude) << '\n'
      << "altitude_step_m = " << format_double(c.altitude_step) << '\n';
  return out.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex_digest(std::uint64_t digest) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << digest;
  return out.str();
}

std::uint64_t config_digest(const EnvConfig& config) {
  // file keys plus the code-only knobs that change results
  std::ostringstream extra;
  for (const auto& w : config.wind_set) extra << "wind " << format_double(w.x()) << ' ' << format_double(w.y()) << '\n';
  const auto& p = config.power;
  const auto& cam = config.camera;
  extra << "power " << format_double(p.ground_speed) << ' ' << format_double(p.climb_cost) << ' '
        << format_double(p.descend_cost) << '\n'
        << "camera " << cam.image_w << ' ' << cam.image_h << ' ' << format_double(cam.f_x) << ' '
        << format_double(cam.f_y) << ' ' << format_double(cam.min_blob_px) << '\n'
        << "charging_reward " << format_double(config.charging_reward) << '\n'
        << "unlimited_battery " << config.unlimited_battery << '\n';
  return fnv1a64(serialize_scenario_config(config) + extra.str());
}

std::uint64_t drag_table_digest(const DragTable& table) { return fnv1a64(to_csv(table)); }

}  // namespace windgrid

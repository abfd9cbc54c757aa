#include "windgrid/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>

#include "windgrid/errors.hpp"
#include "windgrid/scenario_config.hpp"

namespace windgrid {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

MetricComparison make_metric(std::optional<double> rl, std::optional<double> cov, std::string_view missing_flag,
                             std::string_view zero_flag = "coverage: 0") {
  MetricComparison m{rl, cov, std::nullopt, {}};
  if (!rl || !cov) {
    m.flag = std::string(missing_flag);
  } else if (*cov == 0.0) {
    m.flag = std::string(zero_flag);
  } else {
    m.ratio = *rl / *cov;
  }
  return m;
}

std::optional<double> energy_per_detection(const EpisodeTrace& t) {
  if (t.detections == 0) return std::nullopt;
  return t.energy / t.detections;
}

nlohmann::json metric_json(const MetricComparison& m) {
  nlohmann::json j;
  j["rl"] = m.rl ? nlohmann::json(*m.rl) : nlohmann::json(nullptr);
  j["coverage"] = m.coverage ? nlohmann::json(*m.coverage) : nlohmann::json(nullptr);
  j["ratio"] = m.ratio ? nlohmann::json(*m.ratio) : nlohmann::json(nullptr);
  if (!m.flag.empty()) j["flag"] = m.flag;
  return j;
}

struct WindRun {
  WindComparison comparison;
  TrainResult training;
  PlannerRuns rl;
  PlannerRuns coverage;
};

WindRun run_wind(const RunRequest& req, std::size_t wind_id) {
  TrainOptions opts;
  opts.learner.algorithm = req.algorithm;
  opts.episodes = req.episodes;
  opts.wind_id = wind_id;
  opts.seed = req.seed;

  WindRun run;
  run.training = train(req.config, opts);
  // evaluate on the goal layout of the final training block
  const std::size_t eval_episode = req.episodes - 1;
  const CoveragePath path = anchored_serpentine(req.config);

  EnvConfig unlimited = req.config;
  unlimited.unlimited_battery = true;

  run.rl.training = run.training.traces;
  run.rl.battery = greedy_rollout(req.config, run.training.q, eval_episode, wind_id, req.seed);
  run.rl.unlimited = greedy_rollout(unlimited, run.training.q, eval_episode, wind_id, req.seed);
  run.coverage.battery = run_coverage(req.config, path, wind_id, eval_episode);
  run.coverage.unlimited = run_coverage(unlimited, path, wind_id, eval_episode);
  run.comparison = compare(run.rl, run.coverage, req.config);
  return run;
}

void write_wind_outputs(const std::filesystem::path& dir, const WindRun& run, bool plot_data) {
  ensure_output_dir(dir);
  write_text_file(dir / "episodes.csv", episodes_csv(run.training.traces));
  std::ostringstream q;
  save_qtable(q, run.training.q);
  write_text_file(dir / "qtable.txt", q.str());
  write_text_file(dir / "eval_steps.csv", steps_csv(run.rl.battery));
  write_text_file(dir / "coverage_steps.csv", steps_csv(run.coverage.battery));
  if (plot_data) {
    write_text_file(dir / "path_rl.csv", path_csv(run.rl.battery));
    write_text_file(dir / "path_coverage.csv", path_csv(run.coverage.battery));
    write_text_file(dir / "reward_curve.csv", reward_curve_csv(run.training.traces));
  }
}

}  // namespace

ScenarioId parse_scenario_id(std::string_view text) {
  const std::string t = lower(text);
  if (t == "s1" || t == "s1_planar5x5") return ScenarioId::S1_Planar5x5;
  if (t == "s2" || t == "s2_sparsegoalscharging") return ScenarioId::S2_SparseGoalsCharging;
  if (t == "s3" || t == "s3_threed") return ScenarioId::S3_ThreeD;
  if (t == "s4" || t == "s4_largeexploration") return ScenarioId::S4_LargeExploration;
  throw ConfigError("unknown scenario '" + std::string(text) + "' (expected s1, s2, s3 or s4)");
}

std::string_view to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::S1_Planar5x5: return "S1_Planar5x5";
    case ScenarioId::S2_SparseGoalsCharging: return "S2_SparseGoalsCharging";
    case ScenarioId::S3_ThreeD: return "S3_ThreeD";
    case ScenarioId::S4_LargeExploration: return "S4_LargeExploration";
  }
  return "unknown";
}

EnvConfig scenario_preset(ScenarioId id) {
  EnvConfig c;
  switch (id) {
    case ScenarioId::S1_Planar5x5:
      c.world_width = 5;
      c.world_height = 5;
      c.world_altitude = 1;
      c.n_goals = 4;
      c.start_cell = {4, 0, 0};
      c.goal_cells = {{1, 1, 0}, {4, 3, 0}, {2, 4, 0}, {0, 3, 0}};
      break;
    case ScenarioId::S2_SparseGoalsCharging:
      c.world_width = 10;
      c.world_height = 6;
      c.world_altitude = 1;
      c.n_goals = 2;
      c.start_cell = {0, 0, 0};
      c.goal_placement = GoalPlacement::Continuous;
      // footprint half-height 5.6 m covers a full 10 m cell
      c.base_altitude = 10.0;
      c.charging_station = Cell{4, 2, 0};
      break;
    case ScenarioId::S3_ThreeD:
      c.world_width = 7;
      c.world_height = 3;
      c.world_altitude = 2;
      c.n_goals = 4;
      c.start_cell = {0, 1, 0};
      c.goal_cells = {{1, 0, 0}, {3, 2, 0}, {5, 0, 0}, {6, 2, 0}};
      c.base_altitude = 4.0;
      c.altitude_step = 21.0;
      break;
    case ScenarioId::S4_LargeExploration:
      c.world_width = 21;
      c.world_height = 21;
      c.world_altitude = 5;
      c.cell_size = 30.0;
      c.n_goals = 10;
      c.start_cell = {20, 0, 0};
      c.goal_placement = GoalPlacement::Continuous;
      c.goal_radius_min = 0.5;
      c.goal_radius_max = 1.0;
      c.base_altitude = 30.0;
      c.altitude_step = 15.0;
      c.goal_relocation_period = 100;
      break;
  }
  c.validate();
  return c;
}

EnvConfig s3_planar_preset() {
  EnvConfig c = scenario_preset(ScenarioId::S3_ThreeD);
  c.world_altitude = 1;
  return c;
}

EnvConfig s4_desk_preset() {
  EnvConfig c = scenario_preset(ScenarioId::S4_LargeExploration);
  c.world_width = 11;
  c.world_height = 11;
  c.world_altitude = 3;
  c.start_cell = {10, 0, 0};
  c.validate();
  return c;
}

double tail_mean_reward(const std::vector<EpisodeTrace>& traces) {
  if (traces.empty()) throw ContractViolation("tail mean of an empty trace set");
  const std::size_t n = std::max<std::size_t>(1, (traces.size() + 9) / 10);
  double sum = 0.0;
  for (std::size_t i = traces.size() - n; i < traces.size(); ++i) sum += traces[i].total_reward;
  return sum / static_cast<double>(n);
}

WindComparison compare(const PlannerRuns& rl, const PlannerRuns& coverage, const EnvConfig& config) {
  const std::uint64_t digest = config_digest(config);
  auto check = [&](const EpisodeTrace& t, std::string_view what) {
    if (t.config_digest != digest) {
      throw ContractViolation("compare: " + std::string(what) + " was produced under config " +
                              hex_digest(t.config_digest) + ", expected " + hex_digest(digest));
    }
    if (t.wind_id != rl.battery.wind_id) {
      std::ostringstream msg;
      msg << "compare: " << what << " ran at wind " << t.wind_id << ", expected " << rl.battery.wind_id;
      throw ContractViolation(msg.str());
    }
  };
  check(rl.battery, "rl evaluation");
  check(coverage.battery, "coverage run");
  for (const auto& t : rl.training) {
    if (t.config_digest != digest) throw ContractViolation("compare: training trace from a different config");
  }
  if (rl.unlimited && coverage.unlimited && rl.unlimited->config_digest != coverage.unlimited->config_digest) {
    throw ContractViolation("compare: unlimited-battery runs use different configs");
  }

  WindComparison w;
  w.wind_id = rl.battery.wind_id;
  const WindVector& wind = config.wind_set.at(w.wind_id);
  w.wind_x = wind.x();
  w.wind_y = wind.y();
  w.detections_per_battery =
      make_metric(rl.battery.detections, coverage.battery.detections, "", "coverage: 0 detections");

  const auto time_of = [](const std::optional<EpisodeTrace>& t) -> std::optional<double> {
    return t ? t->time_to_all_goals() : std::nullopt;
  };
  w.time_to_all_goals_s = make_metric(time_of(rl.unlimited), time_of(coverage.unlimited), "goals not all found");

  const double rl_reward = rl.training.empty() ? rl.battery.total_reward : tail_mean_reward(rl.training);
  const double cov_reward = coverage.training.empty() ? coverage.battery.total_reward : tail_mean_reward(coverage.training);
  w.mean_reward = make_metric(rl_reward, cov_reward, "");
  w.energy_per_detection =
      make_metric(energy_per_detection(rl.battery), energy_per_detection(coverage.battery), "no detections");
  return w;
}

std::string report_json(const ComparisonReport& r) {
  nlohmann::json j;
  j["scenario"] = r.scenario;
  j["seed"] = r.seed;
  j["algorithm"] = r.algorithm;
  j["episodes"] = r.episodes;
  j["config_digest"] = hex_digest(r.config_digest);
  j["drag_table_digest"] = hex_digest(r.drag_table_digest);
  j["winds"] = nlohmann::json::array();
  for (const auto& w : r.winds) {
    nlohmann::json e;
    e["wind_id"] = w.wind_id;
    e["wind_mps"] = {w.wind_x, w.wind_y};
    e["detections_per_battery"] = metric_json(w.detections_per_battery);
    e["time_to_all_goals_s"] = metric_json(w.time_to_all_goals_s);
    e["mean_reward"] = metric_json(w.mean_reward);
    e["energy_per_detection"] = metric_json(w.energy_per_detection);
    j["winds"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

std::string episodes_csv(const std::vector<EpisodeTrace>& traces) {
  std::ostringstream out;
  out << "episode,wind_id,steps,total_reward,energy,detections,terminal_reason\n";
  for (const auto& t : traces) {
    out << t.episode << ',' << t.wind_id << ',' << t.step_count() << ',' << fmt(t.total_reward) << ','
        << fmt(t.energy) << ',' << t.detections << ',' << (t.terminal ? to_string(*t.terminal) : "path_end") << '\n';
  }
  return out.str();
}

std::string steps_csv(const EpisodeTrace& trace) {
  std::ostringstream out;
  out << "step,x,y,z,action,r_t,battery,detections,energy,leg_seconds\n";
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    out << i << ',' << s.state.x << ',' << s.state.y << ',' << s.state.z << ',' << s.action.id << ',' << fmt(s.r_t)
        << ',' << fmt(s.battery) << ',' << s.detections << ',' << fmt(s.energy) << ',' << fmt(s.leg_seconds) << '\n';
  }
  return out.str();
}

std::string path_csv(const EpisodeTrace& trace) {
  std::ostringstream out;
  out << "x,y,z\n";
  for (const auto& s : trace.steps) out << s.state.x << ',' << s.state.y << ',' << s.state.z << '\n';
  if (!trace.steps.empty()) {
    const auto& last = trace.steps.back();
    const MoveDirection m = action_direction(last.action);
    out << last.state.x + m.dx << ',' << last.state.y + m.dy << ',' << last.state.z + m.dz << '\n';
  }
  return out.str();
}

std::string reward_curve_csv(const std::vector<EpisodeTrace>& traces) {
  std::ostringstream out;
  out << "episode,total_reward,rolling_mean_10\n";
  double window_sum = 0.0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    window_sum += traces[i].total_reward;
    if (i >= 10) window_sum -= traces[i - 10].total_reward;
    const double n = static_cast<double>(std::min<std::size_t>(i + 1, 10));
    out << traces[i].episode << ',' << fmt(traces[i].total_reward) << ',' << fmt(window_sum / n) << '\n';
  }
  return out.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out.flush()) throw ConfigError("cannot write '" + path.string() + "'");
}

void ensure_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw ConfigError("output directory '" + dir.string() + "' is not usable: " + ec.message());
  }
}

ComparisonReport run_comparison(const RunRequest& req) {
  req.config.validate();
  if (req.episodes < 1) throw ConfigError("episodes must be >= 1");
  std::vector<std::size_t> winds;
  if (req.wind_id) {
    if (*req.wind_id >= req.config.wind_set.size()) throw ConfigError("wind index outside the wind set");
    winds.push_back(*req.wind_id);
  } else {
    for (std::size_t k = 0; k < req.config.wind_set.size(); ++k) winds.push_back(k);
  }
  if (req.out_dir) ensure_output_dir(*req.out_dir);

  std::vector<std::future<WindRun>> pending;
  for (const std::size_t k : winds) pending.push_back(std::async(std::launch::async, run_wind, std::cref(req), k));
  std::vector<WindRun> runs;
  // collect every run before rethrowing so no task outlives the request
  std::exception_ptr failure;
  for (auto& f : pending) {
    try {
      runs.push_back(f.get());
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  ComparisonReport report;
  report.scenario = req.name;
  report.seed = req.seed;
  report.algorithm = std::string(to_string(req.algorithm));
  report.episodes = req.episodes;
  report.config_digest = config_digest(req.config);
  report.drag_table_digest = drag_table_digest(req.config.drag_table);
  for (const auto& r : runs) report.winds.push_back(r.comparison);

  if (req.out_dir) {
    for (const auto& r : runs) {
      write_wind_outputs(*req.out_dir / ("wind_" + std::to_string(r.comparison.wind_id)), r, req.emit_plot_data);
    }
    write_text_file(*req.out_dir / "config.txt", serialize_scenario_config(req.config));
    write_text_file(*req.out_dir / "report.json", report_json(report));
  }
  return report;
}

}  // namespace windgrid

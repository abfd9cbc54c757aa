// windgrid: train / evaluate / compare wind-aware grid planners.
//
// Exit codes: 0 ok, 2 configuration error, 3 contract violation.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "windgrid/coverage.hpp"
#include "windgrid/errors.hpp"
#include "windgrid/harness.hpp"
#include "windgrid/planners.hpp"
#include "windgrid/scenario_config.hpp"

namespace fs = std::filesystem;
using namespace windgrid;

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::size_t episodes = 200;
  std::string wind = "all";
  std::string algo = "q";
  std::string drag_table;
  std::string out = "windgrid_out";
  bool emit_plot_data = false;
  std::vector<std::string> overrides;
  std::string qtable;
  std::string scenario;
};

std::uint64_t parse_seed(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string(what) + ": '" + text + "' is not an unsigned 64-bit integer");
  }
}

EnvConfig build_config(const Options& o, EnvConfig base) {
  EnvConfig c = o.config_path.empty() ? std::move(base) : load_scenario_config(o.config_path, std::move(base));
  for (const auto& entry : o.overrides) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + entry + "'");
    apply_config_entry(c, entry.substr(0, eq), entry.substr(eq + 1), "--set");
  }
  if (!o.drag_table.empty()) c.drag_table = load_drag_table_csv(o.drag_table);
  if (o.seed) {
    c.seed = *o.seed;
  } else if (const char* env = std::getenv("WINDGRID_SEED"); env && *env) {
    c.seed = parse_seed(env, "WINDGRID_SEED");
  }
  c.validate();
  return c;
}

std::optional<std::size_t> parse_wind(const std::string& text, const EnvConfig& c) {
  if (text == "all") return std::nullopt;
  try {
    std::size_t used = 0;
    const auto k = std::stoul(text, &used);
    if (used == text.size() && k < c.wind_set.size()) return k;
  } catch (const std::exception&) {
  }
  throw ConfigError("--wind: expected 'all' or an index below " + std::to_string(c.wind_set.size()));
}

std::vector<std::size_t> wind_list(const std::optional<std::size_t>& w, const EnvConfig& c) {
  if (w) return {*w};
  std::vector<std::size_t> all(c.wind_set.size());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  return all;
}

Algorithm parse_algo(const std::string& text) {
  if (text == "q") return Algorithm::QLearning;
  if (text == "sarsa") return Algorithm::Sarsa;
  throw ConfigError("--algo: expected 'q' or 'sarsa', got '" + text + "'");
}

void print_trace(std::ostream& os, const char* label, const EpisodeTrace& t) {
  os << label << " wind=" << t.wind_id << " steps=" << t.step_count() << " detections=" << t.detections
     << " reward=" << t.total_reward << " energy=" << t.energy
     << " terminal=" << (t.terminal ? to_string(*t.terminal) : "path_end") << '\n';
}

int cmd_train(const Options& o) {
  const EnvConfig c = build_config(o, {});
  TrainOptions opts;
  opts.episodes = o.episodes;
  opts.learner.algorithm = parse_algo(o.algo);
  opts.wind_id = parse_wind(o.wind, c);
  opts.seed = c.seed;
  const TrainResult r = train(c, opts);
  const fs::path out = o.out;
  ensure_output_dir(out);
  std::ostringstream q;
  save_qtable(q, r.q);
  write_text_file(out / "episodes.csv", episodes_csv(r.traces));
  write_text_file(out / "qtable.txt", q.str());
  write_text_file(out / "config.txt", serialize_scenario_config(c));
  if (o.emit_plot_data) write_text_file(out / "reward_curve.csv", reward_curve_csv(r.traces));
  std::cout << "trained " << r.traces.size() << " episodes (" << r.phase1_episodes << " constant-epsilon), last-10% mean reward "
            << tail_mean_reward(r.traces) << '\n';
  return 0;
}

int cmd_eval(const Options& o) {
  const EnvConfig c = build_config(o, {});
  const fs::path qpath = o.qtable.empty() ? fs::path(o.out) / "qtable.txt" : fs::path(o.qtable);
  std::ifstream in(qpath);
  if (!in) throw ConfigError("cannot open Q-table '" + qpath.string() + "'");
  const QTable q = load_qtable(in, qtable_dims(c));
  const fs::path out = o.out;
  ensure_output_dir(out);
  for (const std::size_t w : wind_list(parse_wind(o.wind, c), c)) {
    const EpisodeTrace t = greedy_rollout(c, q, o.episodes - 1, w, c.seed);
    print_trace(std::cout, "eval", t);
    write_text_file(out / ("eval_steps_wind_" + std::to_string(w) + ".csv"), steps_csv(t));
    if (o.emit_plot_data) write_text_file(out / ("path_rl_wind_" + std::to_string(w) + ".csv"), path_csv(t));
  }
  return 0;
}

int cmd_coverage(const Options& o) {
  const EnvConfig c = build_config(o, {});
  const CoveragePath path = anchored_serpentine(c);
  const fs::path out = o.out;
  ensure_output_dir(out);
  for (const std::size_t w : wind_list(parse_wind(o.wind, c), c)) {
    const EpisodeTrace t = run_coverage(c, path, w, o.episodes - 1);
    print_trace(std::cout, "coverage", t);
    write_text_file(out / ("coverage_steps_wind_" + std::to_string(w) + ".csv"), steps_csv(t));
    if (o.emit_plot_data) write_text_file(out / ("path_coverage_wind_" + std::to_string(w) + ".csv"), path_csv(t));
  }
  return 0;
}

int cmd_compare(const Options& o, const std::string& name, EnvConfig base) {
  RunRequest req;
  req.name = name;
  req.config = build_config(o, std::move(base));
  req.seed = req.config.seed;
  req.episodes = o.episodes;
  req.algorithm = parse_algo(o.algo);
  req.wind_id = parse_wind(o.wind, req.config);
  req.out_dir = fs::path(o.out);
  req.emit_plot_data = o.emit_plot_data;
  std::cout << report_json(run_comparison(req));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wind-aware grid planners: Q-learning / SARSA against a coverage sweep"};
  app.require_subcommand(1);
  Options o;
  std::string seed_text;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "scenario config file (key = value)");
    sub->add_option("--seed", seed_text, "RNG seed (falls back to WINDGRID_SEED)");
    sub->add_option("--episodes", o.episodes, "training episodes")->check(CLI::PositiveNumber);
    sub->add_option("--wind", o.wind, "wind-set index or 'all'");
    sub->add_option("--algo", o.algo, "q or sarsa");
    sub->add_option("--drag-table", o.drag_table, "drag table CSV (theta_deg,v_rel_mps,c_d)");
    sub->add_option("--out", o.out, "output directory");
    sub->add_flag("--emit-plot-data", o.emit_plot_data, "also write path and reward-curve CSVs");
    sub->add_option("--set", o.overrides, "config override key=value (repeatable)");
  };

  auto* train_cmd = app.add_subcommand("train", "train a Q-table");
  auto* eval_cmd = app.add_subcommand("eval", "greedy rollout of a saved Q-table");
  auto* cov_cmd = app.add_subcommand("coverage", "fly the serpentine coverage path");
  auto* cmp_cmd = app.add_subcommand("compare", "train, evaluate and compare against coverage");
  auto* scn_cmd = app.add_subcommand("scenario", "run a preset scenario (s1..s4)");
  for (auto* sub : {train_cmd, eval_cmd, cov_cmd, cmp_cmd, scn_cmd}) add_common(sub);
  eval_cmd->add_option("--qtable", o.qtable, "Q-table file (default <out>/qtable.txt)");
  scn_cmd->add_option("id", o.scenario, "s1, s2, s3 or s4")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!seed_text.empty()) o.seed = parse_seed(seed_text, "--seed");
    if (*train_cmd) return cmd_train(o);
    if (*eval_cmd) return cmd_eval(o);
    if (*cov_cmd) return cmd_coverage(o);
    if (*cmp_cmd) return cmd_compare(o, "custom", {});
    const ScenarioId id = parse_scenario_id(o.scenario);
    return cmd_compare(o, std::string(to_string(id)), scenario_preset(id));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

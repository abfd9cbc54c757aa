#include "windgrid/planners.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

namespace windgrid {

namespace {

constexpr std::uint64_t kLearnerStream = 1;
constexpr std::uint64_t kGreedyStream = 2;

}  // namespace

QTableDims qtable_dims(const EnvConfig& config) {
  return {config.world_width, config.world_height, config.world_altitude, static_cast<int>(config.wind_set.size())};
}

QTable make_initial_qtable(const EnvConfig& config) {
  QTable q(qtable_dims(config));
  const QTableDims d = q.dims();
  for (int z = 0; z < d.altitude; ++z) {
    for (int y = 0; y < d.height; ++y) {
      for (int x = 0; x < d.width; ++x) {
        for (int a = 0; a < 8; ++a) {
          const ActionId action = ActionId::from_index(a);
          const MoveDirection m = action_direction(action);
          const int nx = x + m.dx;
          const int ny = y + m.dy;
          if (nx >= 0 && nx < d.width && ny >= 0 && ny < d.height) continue;
          for (int w = 0; w < d.winds; ++w) q({x, y, z, static_cast<std::size_t>(w)}, action) = kEdgeActionValue;
        }
      }
    }
  }
  return q;
}

std::string_view to_string(Algorithm algorithm) {
  return algorithm == Algorithm::QLearning ? "q" : "sarsa";
}

void LearnerParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("learner: alpha must be in [0, 1]");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("learner: gamma must be in (0, 1]");
}

double q_update(QTable& q, const StateKey& s, ActionId a, double reward, const StateKey& s_next,
                std::span<const ActionId> valid_next, const LearnerParams& p) {
  double& entry = q(s, a);
  double bootstrap = 0.0;
  if (!valid_next.empty()) {
    bootstrap = -std::numeric_limits<double>::infinity();
    for (const ActionId next : valid_next) bootstrap = std::max(bootstrap, q(s_next, next));
  }
  entry += p.alpha * (reward + p.gamma * bootstrap - entry);
  return entry;
}

double sarsa_update(QTable& q, const StateKey& s, ActionId a, double reward, const StateKey& s_next,
                    std::optional<ActionId> a_next, const LearnerParams& p) {
  double& entry = q(s, a);
  const double bootstrap = a_next ? q(s_next, *a_next) : 0.0;
  entry += p.alpha * (reward + p.gamma * bootstrap - entry);
  return entry;
}

double epsilon_episodic(double eps_init, std::size_t episode, std::size_t total) {
  if (total == 0) throw ConfigError("epsilon schedule: total episodes must be >= 1");
  if (!(eps_init > 0.0 && eps_init < 1.0)) throw ConfigError("epsilon schedule: eps_init must be in (0, 1)");
  if (episode > total) throw ContractViolation("epsilon schedule: episode index past the end");
  if (episode == total) return 0.0;
  const double frac = static_cast<double>(episode) / static_cast<double>(total);
  return std::pow(eps_init, frac / (1.0 - frac));
}

EpsilonSchedule EpsilonSchedule::constant(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must be in (0, 1)");
  return EpsilonSchedule(false, epsilon, 0);
}

EpsilonSchedule EpsilonSchedule::episodic(double eps_init, std::size_t total_episodes) {
  if (total_episodes < 1) throw ConfigError("epsilon schedule: total episodes must be >= 1");
  if (!(eps_init > 0.0 && eps_init < 1.0)) throw ConfigError("epsilon schedule: eps_init must be in (0, 1)");
  return EpsilonSchedule(true, eps_init, total_episodes);
}

double EpsilonSchedule::at(std::size_t episode) const {
  return episodic_ ? epsilon_episodic(value_, std::min(episode, total_), total_) : value_;
}

std::optional<ActionId> select_action(const QTable& q, const StateKey& s, std::span<const ActionId> valid,
                                      double epsilon, Rng& rng) {
  if (valid.empty()) return std::nullopt;
  if (epsilon > 0.0 && uniform01(rng) < epsilon) return valid[uniform_index(rng, valid.size())];
  const auto row = q.row(s);
  double best = -std::numeric_limits<double>::infinity();
  std::array<ActionId, kNumActions> ties{};
  std::size_t n_ties = 0;
  for (const ActionId a : valid) {
    const double v = row(a.index());
    if (v > best) {
      best = v;
      n_ties = 0;
    }
    if (v == best) ties[n_ties++] = a;
  }
  return n_ties == 1 ? ties[0] : ties[uniform_index(rng, n_ties)];
}

void EpisodeTrace::append(const GridState& from, const StepOutcome& outcome) {
  steps.push_back({from, outcome.action, outcome.r_t, outcome.next_state.battery, outcome.n_new_detections,
                   outcome.energy, outcome.leg_seconds});
  total_reward += outcome.r_t;
  energy += outcome.energy;
  detections += outcome.n_new_detections;
  if (outcome.terminal) terminal = outcome.terminal;
}

std::optional<double> EpisodeTrace::time_to_all_goals() const {
  if (terminal != TerminalReason::AllGoalsFound) return std::nullopt;
  double seconds = 0.0;
  for (const auto& s : steps) seconds += s.leg_seconds;
  return seconds;
}

void TrainOptions::validate() const {
  learner.validate();
  if (episodes < 1) throw ConfigError("training: episodes must be >= 1");
  if (!(phase1_epsilon > 0.0 && phase1_epsilon < 1.0)) throw ConfigError("training: phase-1 epsilon must be in (0, 1)");
  if (!(eps_init > 0.0 && eps_init < 1.0)) throw ConfigError("training: eps_init must be in (0, 1)");
  if (!(phase1_fraction >= 0.0 && phase1_fraction < 1.0)) throw ConfigError("training: phase-1 fraction must be in [0, 1)");
  if (wind_block < 1) throw ConfigError("training: wind block must be >= 1");
}

bool has_plateaued(std::span<const EpisodeTrace> traces, std::size_t window, double tolerance) {
  if (window == 0 || traces.size() < window + 1) return false;
  const auto mean_ending_at = [&](std::size_t end) {
    double sum = 0.0;
    for (std::size_t i = end - window; i < end; ++i) sum += traces[i].total_reward;
    return sum / static_cast<double>(window);
  };
  const double now = mean_ending_at(traces.size());
  const double before = mean_ending_at(traces.size() - 1);
  if (before == 0.0) return now == 0.0;
  return std::abs(now - before) < tolerance * std::abs(before);
}

namespace {

// `learn_into` may alias `policy`; nullptr runs without updates.
EpisodeTrace play_episode(GridWorld& env, const QTable& policy, QTable* learn_into, std::size_t episode_index,
                          std::size_t wind_id, double epsilon, const LearnerParams& params, Rng& rng) {
  EpisodeTrace trace;
  trace.episode = episode_index;
  trace.wind_id = wind_id;
  trace.config_digest = env.config_digest();
  const QTable& q = policy;

  GridState state = env.reset(episode_index, wind_id);
  std::vector<ActionId> valid = env.valid_actions();
  std::optional<ActionId> action = select_action(q, StateKey::of(state), valid, epsilon, rng);
  while (action) {
    const StepOutcome out = env.step(*action);
    trace.append(state, out);
    const StateKey s = StateKey::of(state);
    const StateKey s_next = StateKey::of(out.next_state);
    std::vector<ActionId> valid_next;
    std::optional<ActionId> next_action;
    if (!out.terminal) {
      valid_next = env.valid_actions();
      next_action = select_action(q, s_next, valid_next, epsilon, rng);
    }
    if (learn_into) {
      if (params.algorithm == Algorithm::QLearning) {
        q_update(*learn_into, s, *action, out.r_t, s_next, valid_next, params);
      } else {
        sarsa_update(*learn_into, s, *action, out.r_t, s_next, next_action, params);
      }
    }
    state = out.next_state;
    action = next_action;
  }
  return trace;
}

}  // namespace

EpisodeTrace run_episode(GridWorld& env, QTable& q, std::size_t episode_index, std::size_t wind_id, double epsilon,
                         const LearnerParams& params, Rng& rng, bool learn) {
  return play_episode(env, q, learn ? &q : nullptr, episode_index, wind_id, epsilon, params, rng);
}

TrainResult train(const EnvConfig& config, const TrainOptions& options) {
  options.validate();
  GridWorld env(config);
  const std::size_t n_winds = config.wind_set.size();
  if (options.wind_id && *options.wind_id >= n_winds) throw ConfigError("training: wind index outside the wind set");

  std::vector<std::size_t> winds;
  if (options.wind_id) {
    winds.push_back(*options.wind_id);
  } else {
    winds.resize(n_winds);
    std::iota(winds.begin(), winds.end(), std::size_t{0});
  }

  TrainResult result{make_initial_qtable(config), {}, 0};
  result.traces.reserve(options.episodes);
  Rng rng = make_rng(options.seed, kLearnerStream);
  std::size_t episode = 0;

  // Phase 1: constant epsilon, one wind field at a time.
  const auto phase1_budget = static_cast<std::size_t>(std::floor(options.phase1_fraction * options.episodes));
  for (std::size_t k = 0; k < winds.size(); ++k) {
    const std::size_t share = phase1_budget / winds.size() + (k < phase1_budget % winds.size() ? 1 : 0);
    const std::size_t first = result.traces.size();
    for (std::size_t i = 0; i < share; ++i) {
      result.traces.push_back(
          run_episode(env, result.q, episode++, winds[k], options.phase1_epsilon, options.learner, rng));
      if (has_plateaued(std::span(result.traces).subspan(first))) break;
    }
  }
  result.phase1_episodes = result.traces.size();

  // Phase 2: episodic decay over the remaining budget across all winds.
  const std::size_t remaining = options.episodes - result.phase1_episodes;
  std::size_t wind = winds.front();
  for (std::size_t e = 0; e < remaining; ++e) {
    if (winds.size() > 1 && e % options.wind_block == 0) wind = winds[uniform_index(rng, winds.size())];
    const double eps = epsilon_episodic(options.eps_init, e, remaining);
    result.traces.push_back(run_episode(env, result.q, episode++, wind, eps, options.learner, rng));
  }
  return result;
}

EpisodeTrace greedy_rollout(const EnvConfig& config, const QTable& q, std::size_t episode_index,
                            std::size_t wind_id, std::uint64_t seed) {
  GridWorld env(config);
  if (!(q.dims() == qtable_dims(config))) throw ContractViolation("greedy rollout: Q-table does not match config");
  Rng rng = make_rng(seed, kGreedyStream);
  return play_episode(env, q, nullptr, episode_index, wind_id, 0.0, LearnerParams{}, rng);
}

void save_qtable(std::ostream& out, const QTable& q) {
  const QTableDims d = q.dims();
  out << "windgrid-qtable 1\n";
  out << "dims " << d.width << ' ' << d.height << ' ' << d.altitude << ' ' << d.winds << ' ' << kNumActions << '\n';
  out << std::setprecision(17);
  for (int z = 0; z < d.altitude; ++z) {
    for (int y = 0; y < d.height; ++y) {
      for (int x = 0; x < d.width; ++x) {
        for (int w = 0; w < d.winds; ++w) {
          const StateKey s{x, y, z, static_cast<std::size_t>(w)};
          for (int a = 0; a < kNumActions; ++a) {
            const double v = q(s, ActionId::from_index(a));
            if (v != 0.0) out << x << ' ' << y << ' ' << z << ' ' << w << ' ' << a + 1 << ' ' << v << '\n';
          }
        }
      }
    }
  }
}

QTable load_qtable(std::istream& in, const QTableDims& expected) {
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& why) {
    throw ConfigError("qtable:" + std::to_string(line_no) + ": " + why);
  };
  ++line_no;
  if (!std::getline(in, line) || line != "windgrid-qtable 1") fail("expected 'windgrid-qtable 1' header");
  ++line_no;
  if (!std::getline(in, line)) fail("missing dims line");
  std::istringstream dims_line(line);
  std::string tag;
  QTableDims d;
  int actions = 0;
  if (!(dims_line >> tag >> d.width >> d.height >> d.altitude >> d.winds >> actions) || tag != "dims") {
    fail("malformed dims line");
  }
  if (!(d == expected) || actions != kNumActions) {
    std::ostringstream msg;
    msg << "dimension mismatch: file has " << d.width << 'x' << d.height << 'x' << d.altitude << " with " << d.winds
        << " winds and " << actions << " actions, expected " << expected.width << 'x' << expected.height << 'x'
        << expected.altitude << " with " << expected.winds << " winds and " << kNumActions;
    fail(msg.str());
  }
  QTable q(d);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    StateKey s;
    int action = 0;
    std::string value_text;
    if (!(row >> s.x >> s.y >> s.z >> s.wind_id >> action >> value_text)) fail("malformed entry");
    std::string extra;
    if (row >> extra) fail("trailing fields");
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(value_text, &used);
      if (used != value_text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail("bad value '" + value_text + "'");
    }
    if (!std::isfinite(value)) fail("non-finite value");
    if (!q.contains(s) || action < 1 || action > kNumActions) fail("entry outside the table");
    q(s, ActionId{action}) = value;
  }
  return q;
}

}  // namespace windgrid

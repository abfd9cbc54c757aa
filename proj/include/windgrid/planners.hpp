#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "windgrid/errors.hpp"
#include "windgrid/gridworld.hpp"
#include "windgrid/rng.hpp"

namespace windgrid {

/// Index of a Q-table row. Battery is deliberately not part of it.
struct StateKey {
  int x = 0;
  int y = 0;
  int z = 0;
  std::size_t wind_id = 0;

  static StateKey of(const GridState& s) { return {s.x, s.y, s.z, s.wind_id}; }
};

struct QTableDims {
  int width = 0;
  int height = 0;
  int altitude = 0;
  int winds = 0;

  std::size_t states() const { return static_cast<std::size_t>(width) * height * altitude * winds; }
  friend bool operator==(const QTableDims&, const QTableDims&) = default;
};

/// Dense action-value table, one row of kNumActions values per
/// (x, y, z, wind) state.
template <typename Scalar>
class BasicQTable {
 public:
  using Storage = Eigen::Matrix<Scalar, Eigen::Dynamic, kNumActions, Eigen::RowMajor>;

  BasicQTable() = default;
  explicit BasicQTable(const QTableDims& dims)
      : dims_(dims), values_(Storage::Zero(static_cast<Eigen::Index>(dims.states()), kNumActions)) {}

  const QTableDims& dims() const { return dims_; }
  const Storage& values() const { return values_; }
  Storage& values() { return values_; }

  bool contains(const StateKey& s) const {
    return s.x >= 0 && s.x < dims_.width && s.y >= 0 && s.y < dims_.height && s.z >= 0 && s.z < dims_.altitude &&
           s.wind_id < static_cast<std::size_t>(dims_.winds);
  }

  Eigen::Index row_index(const StateKey& s) const {
    if (!contains(s)) throw ContractViolation("Q-table index out of bounds");
    const auto cell = (static_cast<Eigen::Index>(s.z) * dims_.height + s.y) * dims_.width + s.x;
    return cell * dims_.winds + static_cast<Eigen::Index>(s.wind_id);
  }

  Scalar& operator()(const StateKey& s, ActionId a) { return values_(row_index(s), checked(a)); }
  Scalar operator()(const StateKey& s, ActionId a) const { return values_(row_index(s), checked(a)); }

  auto row(const StateKey& s) const { return values_.row(row_index(s)); }

 private:
  static Eigen::Index checked(ActionId a) {
    if (a.id < 1 || a.id > kNumActions) throw ContractViolation("Q-table action out of range");
    return a.index();
  }

  QTableDims dims_{};
  Storage values_;
};

using QTable = BasicQTable<double>;

QTableDims qtable_dims(const EnvConfig& config);

/// Zero table with every domain-leaving action in an edge state set to
/// kEdgeActionValue.
QTable make_initial_qtable(const EnvConfig& config);
inline constexpr double kEdgeActionValue = -100.0;

enum class Algorithm { QLearning, Sarsa };
std::string_view to_string(Algorithm algorithm);

struct LearnerParams {
  double alpha = 0.5;
  double gamma = 1.0;
  Algorithm algorithm = Algorithm::QLearning;

  void validate() const;
};

/// Off-policy update. The bootstrap max runs over `valid_next` only and is 0
/// when it is empty. Returns the new Q(s, a).
double q_update(QTable& q, const StateKey& s, ActionId a, double reward, const StateKey& s_next,
                std::span<const ActionId> valid_next, const LearnerParams& p);

/// On-policy update with the action actually chosen at s_next; nullopt
/// marks a terminal transition (bootstrap 0). Returns the new Q(s, a).
double sarsa_update(QTable& q, const StateKey& s, ActionId a, double reward, const StateKey& s_next,
                    std::optional<ActionId> a_next, const LearnerParams& p);

/// eps_init ^ ((e/E) / (1 - e/E)); 1 at e = 0, eps_init at e = E/2, 0 at e = E.
double epsilon_episodic(double eps_init, std::size_t episode, std::size_t total);

class EpsilonSchedule {
 public:
  static EpsilonSchedule constant(double epsilon);
  static EpsilonSchedule episodic(double eps_init, std::size_t total_episodes);

  double at(std::size_t episode) const;
  bool is_episodic() const { return episodic_; }

 private:
  EpsilonSchedule(bool episodic, double value, std::size_t total) : episodic_(episodic), value_(value), total_(total) {}

  bool episodic_;
  double value_;
  std::size_t total_;
};

/// Epsilon-greedy choice over `valid`; greedy ties are broken uniformly.
/// nullopt when `valid` is empty.
std::optional<ActionId> select_action(const QTable& q, const StateKey& s, std::span<const ActionId> valid,
                                      double epsilon, Rng& rng);

struct StepRecord {
  GridState state;  ///< state the action was taken from
  ActionId action{};
  double r_t = 0.0;
  double battery = 0.0;  ///< battery after the step
  int detections = 0;    ///< new detections on this step
  double energy = 0.0;
  double leg_seconds = 0.0;
};

struct EpisodeTrace {
  std::size_t episode = 0;
  std::size_t wind_id = 0;
  std::vector<StepRecord> steps;
  /// nullopt only when a fixed path (coverage) ran out of legs first.
  std::optional<TerminalReason> terminal;
  double total_reward = 0.0;
  double energy = 0.0;
  int detections = 0;
  std::uint64_t config_digest = 0;

  std::size_t step_count() const { return steps.size(); }
  void append(const GridState& from, const StepOutcome& outcome);
  /// Seconds flown until the step that completed the goal set; nullopt if
  /// never completed.
  std::optional<double> time_to_all_goals() const;
};

struct TrainOptions {
  LearnerParams learner{};
  std::size_t episodes = 100;
  double phase1_epsilon = 0.3;
  double eps_init = 0.05;
  /// Share of the episode budget available to the constant-epsilon phase.
  double phase1_fraction = 0.2;
  /// Train on a single wind-set entry instead of the whole set.
  std::optional<std::size_t> wind_id;
  /// Episodes per phase-2 wind draw.
  std::size_t wind_block = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainResult {
  QTable q;
  std::vector<EpisodeTrace> traces;
  std::size_t phase1_episodes = 0;
};

/// Rolling 10-episode mean reward moved by less than 1% on the last episode.
bool has_plateaued(std::span<const EpisodeTrace> traces, std::size_t window = 10, double tolerance = 0.01);

/// Runs one learning (or, with learn = false, evaluation) episode.
EpisodeTrace run_episode(GridWorld& env, QTable& q, std::size_t episode_index, std::size_t wind_id,
                         double epsilon, const LearnerParams& params, Rng& rng, bool learn = true);

/// Two-phase training: constant epsilon per wind field until the reward
/// plateaus (or the phase-1 budget runs out), then the episodic schedule
/// across the wind set for the remaining episodes.
TrainResult train(const EnvConfig& config, const TrainOptions& options);

/// epsilon = 0 rollout with a read-only table.
EpisodeTrace greedy_rollout(const EnvConfig& config, const QTable& q, std::size_t episode_index,
                            std::size_t wind_id, std::uint64_t seed);

/// Text persistence:
///   windgrid-qtable 1
///   dims <width> <height> <altitude> <winds> 10
///   x y z wind_id action value      (one per nonzero entry)
void save_qtable(std::ostream& out, const QTable& q);
QTable load_qtable(std::istream& in, const QTableDims& expected);

}  // namespace windgrid

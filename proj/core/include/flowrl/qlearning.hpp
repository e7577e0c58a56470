#ifndef FLOWRL_QLEARNING_HPP_
#define FLOWRL_QLEARNING_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "flowrl/flow.hpp"
#include "flowrl/simnet.hpp"

namespace flowrl {

enum class ActionKind { kNoOp, kIncFreq, kDecFreq, kIncRec, kDecRec };
inline constexpr int kNumActions = 5;

std::string to_string(ActionKind a);
std::optional<ActionKind> parse_action(const std::string& text);

// Actions an agent may choose. Single-parameter runs mask out moves of the
// parameter that takes no part in selection.
using ActionMask = std::array<bool, kNumActions>;
inline constexpr ActionMask kAllActions = {true, true, true, true, true};
ActionMask actions_for(ParamMode mode);

class QTable {
 public:
  QTable() : q_(static_cast<std::size_t>(kNumStates) * kNumActions, 0.0) {}

  double get(const ThresholdConfig& s, ActionKind a) const {
    return q_[cell(s, a)];
  }
  void set(const ThresholdConfig& s, ActionKind a, double v) {
    q_[cell(s, a)] = v;
  }
  double max_value(const ThresholdConfig& s,
                   const ActionMask& mask = kAllActions) const;
  const std::vector<double>& values() const { return q_; }

  bool operator==(const QTable&) const = default;

 private:
  static std::size_t cell(const ThresholdConfig& s, ActionKind a) {
    return static_cast<std::size_t>(s.index()) * kNumActions +
           static_cast<std::size_t>(a);
  }
  std::vector<double> q_;
};

struct AgentConfig {
  double alpha = 0.1;
  double gamma = 0.95;
  double epsilon0 = 1.0;
  bool decay = true;  // false keeps epsilon0 fixed
  int budget = 100;   // steps per inner loop
  double goal_mu = 0.4;
  int episode_cap = 1000;
};

struct TrainResult {
  int episodes_run = 0;
  BestSoFar best;
  bool goal_met = false;
  std::int64_t initial_overhead = 0;
  // One record per episode; the initial evaluation only sets
  // initial_overhead.
  std::vector<EpisodeRecord> trace;
};

ActionKind epsilon_greedy_select(const QTable& q, const ThresholdConfig& s,
                                 double eps, std::mt19937_64& rng,
                                 const ActionMask& mask = kAllActions);

ThresholdConfig apply_action(const ThresholdConfig& s, ActionKind a);

void q_update(QTable& q, const ThresholdConfig& s, ActionKind a,
              RewardValue r, const ThresholdConfig& s_next,
              const AgentConfig& cfg, const ActionMask& mask = kAllActions);

double decay_epsilon(double eps, int step, int budget);

// Every cell uniform in [0, 0.01).
QTable init_qtable_random(std::uint64_t seed);
// Random table refined by one training run from each training set.
// Throws EmptyTrainingSets.
QTable init_qtable_from_training(const std::vector<ThresholdConfig>& sets,
                                 std::uint64_t seed, Environment& env,
                                 const AgentConfig& train_cfg,
                                 const ActionMask& mask = kAllActions);

TrainResult q_train(Environment& env, QTable& q, const AgentConfig& cfg,
                    const ThresholdConfig& initial_state, std::mt19937_64& rng,
                    const ActionMask& mask = kAllActions);

// Distinct grid states drawn uniformly, excluding `exclude`.
std::vector<ThresholdConfig> random_threshold_sets(
    int n, std::mt19937_64& rng, const std::vector<ThresholdConfig>& exclude = {});

// `freq_thr,rec_thr,action,q_value` per cell, sorted by state then action.
void write_qtable(std::ostream& out, const QTable& q);
QTable read_qtable(std::istream& in);

}  // namespace flowrl

#endif  // FLOWRL_QLEARNING_HPP_

#ifndef FLOWRL_DQN_HPP_
#define FLOWRL_DQN_HPP_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <random>
#include <vector>

#include "flowrl/mlp.hpp"
#include "flowrl/qlearning.hpp"
#include "flowrl/simnet.hpp"

namespace flowrl {

inline const std::vector<int> kQNetLayers = {4, 24, 24, 24, kNumActions};

struct Experience {
  std::vector<double> s;
  ActionKind a = ActionKind::kNoOp;
  RewardValue r;
  std::vector<double> s_next;
};

// Bounded FIFO of transitions with uniform minibatch sampling.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity = 1000) : capacity_(capacity) {}

  void store(Experience e);
  // n distinct stored transitions. Throws InsufficientExperiences.
  std::vector<Experience> sample(std::size_t n, std::mt19937_64& rng) const;

  std::size_t size() const { return buffer_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::deque<Experience>& contents() const { return buffer_; }

 private:
  std::size_t capacity_;
  std::deque<Experience> buffer_;
};

struct DqnConfig {
  double gamma = 0.95;
  double sgd_learning_rate = 0.01;
  double epsilon0 = 1.0;
  bool decay = true;
  int budget = 100;
  double goal_mu = 0.4;
  int episode_cap = 1000;
  double weight_init_scale = 0.1;
  std::size_t start_threshold = 32;
  std::size_t minibatch = 4;
};

// [freq/200, rec/300, action/4, reward]
std::vector<double> encode_state(const ThresholdConfig& s, ActionKind last_action,
                                 RewardValue last_reward);

// r + gamma * max over the allowed heads of net_prev(s_next).
double dqn_target(const Experience& e, const Mlp& net_prev, double gamma,
                  const ActionMask& mask = kAllActions);

Mlp make_qnet(double scale, std::mt19937_64& rng);

ActionKind dqn_select(const Mlp& net, const std::vector<double>& state,
                      double eps, std::mt19937_64& rng,
                      const ActionMask& mask = kAllActions);

TrainResult dqn_train(Environment& env, Mlp& net, ReplayMemory& memory,
                      const DqnConfig& cfg, const ThresholdConfig& initial_state,
                      std::mt19937_64& rng, const ActionMask& mask = kAllActions);

// One training run from each set, sharing the net and replay memory.
// Throws EmptyTrainingSets.
void pretrain_dqn(Mlp& net, ReplayMemory& memory,
                  const std::vector<ThresholdConfig>& sets, Environment& env,
                  const DqnConfig& train_cfg, std::mt19937_64& rng,
                  const ActionMask& mask = kAllActions);

}  // namespace flowrl

#endif  // FLOWRL_DQN_HPP_

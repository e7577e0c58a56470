#include "flowrl/dqn.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

#include "flowrl/error.hpp"
#include "goal_loop.hpp"

namespace flowrl {

void ReplayMemory::store(Experience e) {
  if (capacity_ == 0) return;
  if (buffer_.size() == capacity_) buffer_.pop_front();
  buffer_.push_back(std::move(e));
}

std::vector<Experience> ReplayMemory::sample(std::size_t n,
                                             std::mt19937_64& rng) const {
  if (buffer_.size() < n) {
    throw Error(ErrorCode::kInsufficientExperiences,
                "need " + std::to_string(n) + ", have " +
                    std::to_string(buffer_.size()));
  }
  // Partial Fisher-Yates over the indices.
  std::vector<std::size_t> idx(buffer_.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<Experience> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
    out.push_back(buffer_[idx[i]]);
  }
  return out;
}

std::vector<double> encode_state(const ThresholdConfig& s, ActionKind last_action,
                                 RewardValue last_reward) {
  return {static_cast<double>(s.freq_threshold) / kFreqThresholdMax,
          static_cast<double>(s.recentness_threshold) / kRecThresholdMax,
          static_cast<double>(static_cast<int>(last_action)) / (kNumActions - 1),
          static_cast<double>(last_reward.value)};
}

double dqn_target(const Experience& e, const Mlp& net_prev, double gamma,
                  const ActionMask& mask) {
  auto q = mlp_forward(net_prev, e.s_next);
  int best = -1;
  for (int a = 0; a < kNumActions; ++a) {
    if (mask[a] && (best < 0 || q[a] > q[best])) best = a;
  }
  return e.r.value + gamma * q[best < 0 ? 0 : best];
}

Mlp make_qnet(double scale, std::mt19937_64& rng) {
  return Mlp::random(kQNetLayers, scale, rng);
}

ActionKind dqn_select(const Mlp& net, const std::vector<double>& state,
                      double eps, std::mt19937_64& rng, const ActionMask& mask) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (eps > 0.0 && coin(rng) < eps) {
    std::vector<int> allowed;
    for (int a = 0; a < kNumActions; ++a) {
      if (mask[a]) allowed.push_back(a);
    }
    std::uniform_int_distribution<std::size_t> pick(0, allowed.size() - 1);
    return static_cast<ActionKind>(allowed[pick(rng)]);
  }
  auto q = mlp_forward(net, state);
  int best = -1;
  for (int a = 0; a < kNumActions; ++a) {
    if (mask[a] && (best < 0 || q[a] > q[best])) best = a;
  }
  return static_cast<ActionKind>(best < 0 ? 0 : best);
}

TrainResult dqn_train(Environment& env, Mlp& net, ReplayMemory& memory,
                      const DqnConfig& cfg, const ThresholdConfig& initial_state,
                      std::mt19937_64& rng, const ActionMask& mask) {
  detail::LoopParams p{cfg.epsilon0, cfg.decay, cfg.budget, cfg.goal_mu,
                       cfg.episode_cap};
  ActionKind last_action = ActionKind::kNoOp;
  RewardValue last_reward{0};
  return detail::goal_loop(
      env, p, initial_state,
      [&](const ThresholdConfig& s, double eps) {
        return dqn_select(net, encode_state(s, last_action, last_reward), eps,
                          rng, mask);
      },
      [&](const ThresholdConfig& s, ActionKind a, RewardValue r,
          const ThresholdConfig& s_next) {
        memory.store({encode_state(s, last_action, last_reward), a, r,
                      encode_state(s_next, a, r)});
        last_action = a;
        last_reward = r;
        if (memory.size() < std::max(cfg.start_threshold, cfg.minibatch)) {
          return;
        }
        Mlp snapshot = net;
        for (const Experience& e : memory.sample(cfg.minibatch, rng)) {
          double target = dqn_target(e, snapshot, cfg.gamma, mask);
          sgd_step(net, e.s, static_cast<int>(e.a), target,
                   cfg.sgd_learning_rate);
        }
      });
}

void pretrain_dqn(Mlp& net, ReplayMemory& memory,
                  const std::vector<ThresholdConfig>& sets, Environment& env,
                  const DqnConfig& train_cfg, std::mt19937_64& rng,
                  const ActionMask& mask) {
  if (sets.empty()) {
    throw Error(ErrorCode::kEmptyTrainingSets, "no training sets given",
                "agent-dqn");
  }
  for (const ThresholdConfig& s0 : sets) {
    dqn_train(env, net, memory, train_cfg, s0, rng, mask);
  }
}

}  // namespace flowrl

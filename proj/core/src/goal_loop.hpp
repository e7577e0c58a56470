#ifndef FLOWRL_SRC_GOAL_LOOP_HPP_
#define FLOWRL_SRC_GOAL_LOOP_HPP_

#include "flowrl/qlearning.hpp"
#include "flowrl/simnet.hpp"

namespace flowrl::detail {

struct LoopParams {
  double epsilon0 = 1.0;
  bool decay = true;
  int budget = 100;
  double goal_mu = 0.4;
  int episode_cap = 1000;
};

// The goal-driven outer loop shared by both agents. `select(s, eps)` picks an
// action; `learn(s, a, r, s_next)` consumes the transition.
template <typename Select, typename Learn>
TrainResult goal_loop(Environment& env, const LoopParams& p,
                      const ThresholdConfig& initial_state, Select&& select,
                      Learn&& learn) {
  TrainResult result;
  ThresholdConfig s = initial_state;
  EpisodeMetrics first = env.evaluate(s);
  result.initial_overhead = first.overhead;
  result.best = {first.overhead, s};
  if (first.overhead == 0) return result;  // nothing left to reduce

  double eps = p.epsilon0;
  int budget = p.budget > 0 ? p.budget : 1;
  while (true) {
    for (int step = 0; step < budget; ++step) {
      if (result.episodes_run >= p.episode_cap) return result;
      double eps_used = eps;
      ActionKind a = select(s, eps);
      if (p.decay) eps = decay_epsilon(eps, step, budget);
      ThresholdConfig s_next = apply_action(s, a);
      EpisodeMetrics m = env.evaluate(s_next);
      ++result.episodes_run;
      RewardValue r = compute_reward(result.best, m.overhead, s_next);
      learn(s, a, r, s_next);
      result.trace.push_back(
          {result.episodes_run, m,
           reduction_fraction(result.initial_overhead, m.overhead), s_next,
           r.value, eps_used});
      s = s_next;
      double improvement = reduction_fraction(result.initial_overhead,
                                              result.best.best_overhead);
      if (improvement > p.goal_mu) {
        result.goal_met = true;
        return result;
      }
    }
  }
}

}  // namespace flowrl::detail

#endif  // FLOWRL_SRC_GOAL_LOOP_HPP_

#include "flowrl/qlearning.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <string>

#include "flowrl/error.hpp"
#include "flowrl/textio.hpp"
#include "goal_loop.hpp"

namespace flowrl {

namespace {

constexpr const char* kActionNames[kNumActions] = {"NoOp", "IncFreq", "DecFreq",
                                                   "IncRec", "DecRec"};

int greedy(const QTable& q, const ThresholdConfig& s, const ActionMask& mask) {
  int best = -1;
  for (int a = 0; a < kNumActions; ++a) {
    if (!mask[a]) continue;
    if (best < 0 || q.get(s, static_cast<ActionKind>(a)) >
                        q.get(s, static_cast<ActionKind>(best))) {
      best = a;
    }
  }
  return best < 0 ? 0 : best;
}

}  // namespace

std::string to_string(ActionKind a) {
  return kActionNames[static_cast<int>(a)];
}

std::optional<ActionKind> parse_action(const std::string& text) {
  for (int a = 0; a < kNumActions; ++a) {
    if (text == kActionNames[a]) return static_cast<ActionKind>(a);
  }
  return std::nullopt;
}

ActionMask actions_for(ParamMode mode) {
  switch (mode) {
    case ParamMode::kFreqOnly: return {true, true, true, false, false};
    case ParamMode::kRecentnessOnly: return {true, false, false, true, true};
    case ParamMode::kBoth: break;
  }
  return kAllActions;
}

double QTable::max_value(const ThresholdConfig& s,
                         const ActionMask& mask) const {
  return get(s, static_cast<ActionKind>(greedy(*this, s, mask)));
}

ActionKind epsilon_greedy_select(const QTable& q, const ThresholdConfig& s,
                                 double eps, std::mt19937_64& rng,
                                 const ActionMask& mask) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (eps > 0.0 && coin(rng) < eps) {
    std::vector<int> allowed;
    for (int a = 0; a < kNumActions; ++a) {
      if (mask[a]) allowed.push_back(a);
    }
    std::uniform_int_distribution<std::size_t> pick(0, allowed.size() - 1);
    return static_cast<ActionKind>(allowed[pick(rng)]);
  }
  return static_cast<ActionKind>(greedy(q, s, mask));
}

ThresholdConfig apply_action(const ThresholdConfig& s, ActionKind a) {
  ThresholdConfig out = s;
  switch (a) {
    case ActionKind::kNoOp: break;
    case ActionKind::kIncFreq: out.freq_threshold += kThresholdStep; break;
    case ActionKind::kDecFreq: out.freq_threshold -= kThresholdStep; break;
    case ActionKind::kIncRec: out.recentness_threshold += kThresholdStep; break;
    case ActionKind::kDecRec: out.recentness_threshold -= kThresholdStep; break;
  }
  out.freq_threshold = std::clamp(out.freq_threshold, 0, kFreqThresholdMax);
  out.recentness_threshold =
      std::clamp(out.recentness_threshold, 0, kRecThresholdMax);
  return out;
}

void q_update(QTable& q, const ThresholdConfig& s, ActionKind a,
              RewardValue r, const ThresholdConfig& s_next,
              const AgentConfig& cfg, const ActionMask& mask) {
  double old = q.get(s, a);
  double target = r.value + cfg.gamma * q.max_value(s_next, mask);
  q.set(s, a, old + cfg.alpha * (target - old));
}

double decay_epsilon(double eps, int step, int budget) {
  return eps - (static_cast<double>(step) / budget) * eps;
}

QTable init_qtable_random(std::uint64_t seed) {
  QTable q;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 0.01);
  for (int i = 0; i < kNumStates; ++i) {
    for (int a = 0; a < kNumActions; ++a) {
      q.set(ThresholdConfig::from_index(i), static_cast<ActionKind>(a), u(rng));
    }
  }
  return q;
}

QTable init_qtable_from_training(const std::vector<ThresholdConfig>& sets,
                                 std::uint64_t seed, Environment& env,
                                 const AgentConfig& train_cfg,
                                 const ActionMask& mask) {
  if (sets.empty()) {
    throw Error(ErrorCode::kEmptyTrainingSets, "no training sets given");
  }
  QTable q = init_qtable_random(seed);
  std::mt19937_64 rng(seed ^ 0x5851f42d4c957f2dULL);
  for (const ThresholdConfig& s0 : sets) {
    q_train(env, q, train_cfg, s0, rng, mask);
  }
  return q;
}

TrainResult q_train(Environment& env, QTable& q, const AgentConfig& cfg,
                    const ThresholdConfig& initial_state, std::mt19937_64& rng,
                    const ActionMask& mask) {
  detail::LoopParams p{cfg.epsilon0, cfg.decay, cfg.budget, cfg.goal_mu,
                       cfg.episode_cap};
  return detail::goal_loop(
      env, p, initial_state,
      [&](const ThresholdConfig& s, double eps) {
        return epsilon_greedy_select(q, s, eps, rng, mask);
      },
      [&](const ThresholdConfig& s, ActionKind a, RewardValue r,
          const ThresholdConfig& s_next) {
        q_update(q, s, a, r, s_next, cfg, mask);
      });
}

std::vector<ThresholdConfig> random_threshold_sets(
    int n, std::mt19937_64& rng, const std::vector<ThresholdConfig>& exclude) {
  std::set<int> taken;
  for (const auto& s : exclude) taken.insert(s.index());
  std::uniform_int_distribution<int> pick(0, kNumStates - 1);
  std::vector<ThresholdConfig> out;
  while (static_cast<int>(out.size()) < n &&
         static_cast<int>(taken.size()) < kNumStates) {
    int i = pick(rng);
    if (taken.insert(i).second) out.push_back(ThresholdConfig::from_index(i));
  }
  return out;
}

void write_qtable(std::ostream& out, const QTable& q) {
  for (int i = 0; i < kNumStates; ++i) {
    ThresholdConfig s = ThresholdConfig::from_index(i);
    for (int a = 0; a < kNumActions; ++a) {
      auto act = static_cast<ActionKind>(a);
      out << s.freq_threshold << ',' << s.recentness_threshold << ','
          << to_string(act) << ',' << format_exact(q.get(s, act)) << '\n';
    }
  }
}

QTable read_qtable(std::istream& in) {
  QTable q;
  std::vector<bool> seen(static_cast<std::size_t>(kNumStates) * kNumActions);
  std::string line;
  int line_no = 0;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto parts = split(body, ',');
    std::int64_t f = 0, r = 0;
    double v = 0.0;
    std::optional<ActionKind> act;
    if (parts.size() == 4) act = parse_action(std::string(trim(parts[2])));
    ThresholdConfig s;
    bool ok = parts.size() == 4 && parse_int(parts[0], &f) &&
              parse_int(parts[1], &r) && act && parse_double(parts[3], &v);
    if (ok) {
      s = {static_cast<int>(f), static_cast<int>(r)};
      ok = s.on_grid();
    }
    if (!ok) {
      throw Error(ErrorCode::kParseError,
                  "q-table line " + std::to_string(line_no), "agent-q");
    }
    std::size_t cell = static_cast<std::size_t>(s.index()) * kNumActions +
                       static_cast<std::size_t>(*act);
    if (!seen[cell]) ++count;
    seen[cell] = true;
    q.set(s, *act, v);
  }
  if (count != seen.size()) {
    throw Error(ErrorCode::kParseError,
                "q-table has " + std::to_string(count) + " of " +
                    std::to_string(seen.size()) + " cells",
                "agent-q");
  }
  return q;
}

}  // namespace flowrl

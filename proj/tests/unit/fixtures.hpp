#ifndef FLOWRL_TESTS_FIXTURES_HPP_
#define FLOWRL_TESTS_FIXTURES_HPP_

#include <cstdint>
#include <map>
#include <vector>

#include "flowrl/flow.hpp"
#include "flowrl/qlearning.hpp"
#include "flowrl/simnet.hpp"
#include "flowrl/traffic.hpp"

namespace flowrl::testing {

// Distinct, valid flow ids indexed by n.
inline FlowId fid(int n) {
  return FlowId{n % 7, n % 7 + 1, 1024 + n, 80, Protocol::kTcp};
}

// A profile where one packet is `packet_size` bytes and a flow emits
// `per_tick` packets per tick.
inline TrafficProfile unit_profile(std::int64_t per_tick) {
  TrafficProfile p;
  p.packet_size = 1000;
  p.per_flow_rate = static_cast<double>(per_tick) * 1000.0 * 8.0;
  return p;
}

// Flows given as (start, packet count); sizes are exact multiples of the
// packet size.
inline FlowSchedule hand_schedule(
    const std::vector<std::pair<double, std::int64_t>>& flows,
    double horizon, std::int64_t per_tick = 1) {
  FlowSchedule s;
  s.horizon = horizon;
  s.profile = unit_profile(per_tick);
  int n = 0;
  for (const auto& [start, packets] : flows) {
    FlowSpec f;
    f.id = fid(n++);
    f.start = start;
    f.size = packets * s.profile.packet_size;
    f.duration = static_cast<double>(f.size) * 8.0 / s.profile.per_flow_rate;
    s.flows.push_back(f);
  }
  return s;
}

// An environment backed by a lookup table; states not listed cost `rest`.
class TableEnv : public Environment {
 public:
  explicit TableEnv(std::int64_t rest) : rest_(rest) {}
  void set(ThresholdConfig s, std::int64_t overhead) { cost_[s] = overhead; }
  EpisodeMetrics evaluate(const ThresholdConfig& s) override {
    ++calls;
    auto it = cost_.find(s);
    EpisodeMetrics m;
    m.overhead = m.misses = it == cost_.end() ? rest_ : it->second;
    m.total_lookups = m.misses + 10;
    m.hits = 10;
    return m;
  }
  int calls = 0;

 private:
  std::int64_t rest_;
  std::map<ThresholdConfig, std::int64_t> cost_;
};

}  // namespace flowrl::testing

#endif  // FLOWRL_TESTS_FIXTURES_HPP_

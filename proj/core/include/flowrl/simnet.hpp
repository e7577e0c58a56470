#ifndef FLOWRL_SIMNET_HPP_
#define FLOWRL_SIMNET_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <unordered_map>
#include <vector>

#include "flowrl/flow.hpp"
#include "flowrl/traffic.hpp"

namespace flowrl {

enum class EventKind { kConnectionUp, kConnectionDown, kPacketIn };

struct SimEvent {
  EventKind kind = EventKind::kConnectionUp;
  double time = 0.0;
  std::optional<FlowId> flow;
};

using EventSink = std::function<void(const SimEvent&)>;

struct EpisodeMetrics {
  std::int64_t overhead = 0;
  std::int64_t hits = 0;
  std::int64_t misses = 0;
  std::int64_t total_lookups = 0;
  double duration = 0.0;
};

struct RewardValue {
  int value = 0;  // -1, 0 or +1
  bool operator==(const RewardValue&) const = default;
};

struct BestSoFar {
  std::int64_t best_overhead = 0;
  ThresholdConfig best_thresholds;
};

// Replays [0, window) of the schedule with an empty table and records
// every looked-up flow in the controller's pool.
FlowPool run_orchestration(const FlowSchedule& schedule, double window);

// Preinstalls `ruleset` into `table` and replays the schedule over
// [0, horizon). Misses are forwarded by the controller without installing a
// rule. PacketIn events are emitted one per missed packet when `sink` is set.
// Throws RulesetTooLarge.
EpisodeMetrics run_episode(const std::vector<FlowId>& ruleset,
                           const FlowSchedule& schedule, FlowTable& table,
                           const EventSink& sink = {});

// +1 and best updated when current beats best, -1 when worse, 0 on a tie.
RewardValue compute_reward(BestSoFar& best, std::int64_t current_overhead,
                           const ThresholdConfig& at = {});

// Throws ZeroInitial.
double reduction_fraction(std::int64_t initial, std::int64_t current);
// Throws NoLookups.
double hit_ratio(const EpisodeMetrics& m);

// One row of the per-episode report.
struct EpisodeRecord {
  int episode = 0;
  EpisodeMetrics metrics;
  double reduction = 0.0;
  ThresholdConfig thresholds;
  int reward = 0;
  double epsilon = 0.0;
};

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const EpisodeRecord& rec);

// Anything an agent can evaluate a threshold pair against.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual EpisodeMetrics evaluate(const ThresholdConfig& thresholds) = 0;
};

// Orchestration pool plus production episodes over the same schedule.
// Episodes are deterministic, so results are memoized per threshold pair.
class PlacementEnv : public Environment {
 public:
  PlacementEnv(FlowSchedule schedule, double window,
               std::int64_t capacity_bits,
               ParamMode mode = ParamMode::kBoth);

  EpisodeMetrics evaluate(const ThresholdConfig& thresholds) override;

  std::vector<FlowId> ruleset(const ThresholdConfig& thresholds) const;
  EpisodeMetrics run_ruleset(const std::vector<FlowId>& ruleset) const;

  const FlowSchedule& schedule() const { return schedule_; }
  const FlowPool& pool() const { return pool_; }
  double window() const { return window_; }
  std::int64_t capacity_bits() const { return capacity_bits_; }
  ParamMode mode() const { return mode_; }

 private:
  FlowSchedule schedule_;
  double window_;
  std::int64_t capacity_bits_;
  ParamMode mode_;
  FlowPool pool_;
  std::unordered_map<int, EpisodeMetrics> cache_;
};

}  // namespace flowrl

#endif  // FLOWRL_SIMNET_HPP_

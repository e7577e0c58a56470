#include "flowrl/simnet.hpp"

#include <cmath>
#include <ostream>
#include <string>
#include <utility>

#include "flowrl/error.hpp"
#include "flowrl/textio.hpp"

namespace flowrl {

namespace {

std::int64_t tick_count(double t) {
  return static_cast<std::int64_t>(std::ceil(t));
}

}  // namespace

FlowPool run_orchestration(const FlowSchedule& schedule, double window) {
  FlowPool pool;
  std::int64_t end = tick_count(window);
  for (std::int64_t tick = 0; tick < end; ++tick) {
    for (const TickEmission& e : packets_for_tick(schedule, tick)) {
      pool.record(e.id, static_cast<double>(tick), e.packets);
    }
  }
  return pool;
}

EpisodeMetrics run_episode(const std::vector<FlowId>& ruleset,
                           const FlowSchedule& schedule, FlowTable& table,
                           const EventSink& sink) {
  if (table.size() + ruleset.size() > table.max_entries()) {
    throw Error(ErrorCode::kRulesetTooLarge,
                std::to_string(ruleset.size()) + " rules, room for " +
                    std::to_string(table.max_entries() - table.size()));
  }
  if (sink) sink({EventKind::kConnectionUp, 0.0, std::nullopt});
  for (const FlowId& id : ruleset) {
    table.insert(FlowRule{id, kRuleSizeBits, 0, 0.0, 0.0});
  }

  EpisodeMetrics m;
  std::int64_t end = tick_count(schedule.horizon);
  for (std::int64_t tick = 0; tick < end; ++tick) {
    double now = static_cast<double>(tick);
    for (const TickEmission& e : packets_for_tick(schedule, tick)) {
      m.total_lookups += e.packets;
      if (table.lookup(e.id, now, e.packets) == LookupResult::kHit) {
        m.hits += e.packets;
      } else {
        m.misses += e.packets;
        if (sink) {
          for (std::int64_t k = 0; k < e.packets; ++k) {
            sink({EventKind::kPacketIn, now, e.id});
          }
        }
      }
    }
  }
  m.overhead = m.misses;
  m.duration = static_cast<double>(end);
  if (sink) sink({EventKind::kConnectionDown, m.duration, std::nullopt});
  return m;
}

RewardValue compute_reward(BestSoFar& best, std::int64_t current_overhead,
                           const ThresholdConfig& at) {
  if (current_overhead < best.best_overhead) {
    best.best_overhead = current_overhead;
    best.best_thresholds = at;
    return {1};
  }
  if (current_overhead > best.best_overhead) return {-1};
  return {0};
}

double reduction_fraction(std::int64_t initial, std::int64_t current) {
  if (initial == 0) throw Error(ErrorCode::kZeroInitial, "initial overhead is 0");
  return static_cast<double>(initial - current) / static_cast<double>(initial);
}

double hit_ratio(const EpisodeMetrics& m) {
  if (m.total_lookups == 0) throw Error(ErrorCode::kNoLookups, "no lookups");
  return static_cast<double>(m.hits) / static_cast<double>(m.total_lookups);
}

void write_csv_header(std::ostream& out) {
  out << "episode,overhead,hits,misses,hit_ratio,reduction,freq_thr,rec_thr,"
         "reward,epsilon\n";
}

void write_csv_row(std::ostream& out, const EpisodeRecord& rec) {
  const EpisodeMetrics& m = rec.metrics;
  double ratio = m.total_lookups > 0 ? hit_ratio(m) : 0.0;
  out << rec.episode << ',' << m.overhead << ',' << m.hits << ',' << m.misses
      << ',' << format_fixed(ratio, 6) << ',' << format_fixed(rec.reduction, 6)
      << ',' << rec.thresholds.freq_threshold << ','
      << rec.thresholds.recentness_threshold << ',' << rec.reward << ','
      << format_fixed(rec.epsilon, 6) << '\n';
}

PlacementEnv::PlacementEnv(FlowSchedule schedule, double window,
                           std::int64_t capacity_bits, ParamMode mode)
    : schedule_(std::move(schedule)),
      window_(window),
      capacity_bits_(capacity_bits),
      mode_(mode),
      pool_(run_orchestration(schedule_, window)) {}

std::vector<FlowId> PlacementEnv::ruleset(
    const ThresholdConfig& thresholds) const {
  return select_rules(pool_, thresholds, capacity_bits_,
                      static_cast<double>(tick_count(window_)), mode_);
}

EpisodeMetrics PlacementEnv::run_ruleset(
    const std::vector<FlowId>& ruleset) const {
  FlowTable table(capacity_bits_);
  return run_episode(ruleset, schedule_, table);
}

EpisodeMetrics PlacementEnv::evaluate(const ThresholdConfig& thresholds) {
  int key = thresholds.index();
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  EpisodeMetrics m = run_ruleset(ruleset(thresholds));
  cache_.emplace(key, m);
  return m;
}

}  // namespace flowrl

#ifndef FLOWRL_MBF_HPP_
#define FLOWRL_MBF_HPP_

#include <cstdint>
#include <vector>

#include "flowrl/flow.hpp"
#include "flowrl/simnet.hpp"
#include "flowrl/traffic.hpp"

namespace flowrl {

struct MbfConfig {
  int filters = 4;
  int bits = 4096;
  int hashes = 3;
  double window = 5.0;                  // sim-seconds per filter
  std::vector<int> weights = {8, 4, 2, 1};  // newest to oldest
  std::uint64_t hash_seed = 0x6a09e667f3bcc909ULL;
};

class BloomFilter {
 public:
  BloomFilter(int bits, int hashes, std::uint64_t seed);

  void insert(const FlowId& id);
  bool contains(const FlowId& id) const;
  void clear();

 private:
  std::size_t position(const FlowId& id, int k) const;

  int bits_;
  int hashes_;
  std::uint64_t seed_;
  std::vector<std::uint64_t> words_;
};

// Aging bloom filters scoring flow importance by recent activity.
class MbfState {
 public:
  explicit MbfState(MbfConfig cfg = {});

  // Ages the filters up to the window holding `tick`, then records
  // `matched` in the newest filter.
  void step(const std::vector<FlowId>& matched, double tick);
  // Sum of the weights of the filters reporting `id`; range [0, 15] with
  // the default weights.
  int importance(const FlowId& id) const;
  bool in_filter(int slot, const FlowId& id) const;

  const MbfConfig& config() const { return cfg_; }
  std::int64_t window_index() const { return window_index_; }

 private:
  void shift();

  MbfConfig cfg_;
  std::vector<BloomFilter> filters_;  // [0] is newest
  std::int64_t window_index_ = 0;
};

void mbf_step(MbfState& state, const std::vector<FlowId>& matched, double tick);
int mbf_importance(const MbfState& state, const FlowId& id);

// Reactive baseline: a miss installs the flow's rule, evicting the entry
// with the lowest importance (then oldest install, then FlowId) when the
// table is full. Packets of concurrently active flows are interleaved
// round-robin within a tick.
EpisodeMetrics run_mbf_episode(const FlowSchedule& schedule, FlowTable& table,
                               const MbfConfig& cfg = {});

}  // namespace flowrl

#endif  // FLOWRL_MBF_HPP_

#ifndef FLOWRL_FLOW_HPP_
#define FLOWRL_FLOW_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace flowrl {

// Every flow entry occupies a fixed 356 bits of TCAM.
inline constexpr std::int64_t kRuleSizeBits = 356;

enum class Protocol : std::uint8_t { kTcp };

struct FlowId {
  int src_host = 0;
  int dst_host = 1;
  int src_port = 1;
  int dst_port = 1;
  Protocol proto = Protocol::kTcp;

  auto operator<=>(const FlowId&) const = default;
  bool operator==(const FlowId&) const = default;

  bool valid() const;
  std::uint64_t pack() const;
};

// "src-dst-sport-dport-tcp"
std::string to_string(const FlowId& id);
std::optional<FlowId> parse_flow_id(const std::string& text);

struct FlowIdHash {
  std::size_t operator()(const FlowId& id) const;
};

struct FlowRule {
  FlowId id;
  std::int64_t size_bits = kRuleSizeBits;
  std::int64_t match_count = 0;
  double last_match_time = 0.0;
  double install_time = 0.0;
};

enum class LookupResult { kHit, kMiss };

// Capacity-bounded exact-match flow table.
class FlowTable {
 public:
  explicit FlowTable(std::int64_t capacity_bits);

  std::int64_t capacity_bits() const { return capacity_bits_; }
  std::size_t max_entries() const;
  std::size_t size() const { return entries_.size(); }
  std::int64_t used_bits() const { return used_bits_; }
  bool full() const { return size() >= max_entries(); }

  bool contains(const FlowId& id) const { return entries_.count(id) != 0; }
  const FlowRule* find(const FlowId& id) const;

  // Throws CapacityExceeded or DuplicateRule.
  void insert(const FlowRule& rule);
  void erase(const FlowId& id);
  void clear() {
    entries_.clear();
    used_bits_ = 0;
  }

  // A batch of `packets` lookups at the same instant. On a hit the match
  // counter advances by `packets`.
  LookupResult lookup(const FlowId& id, double now, std::int64_t packets = 1);

  const std::unordered_map<FlowId, FlowRule, FlowIdHash>& entries() const {
    return entries_;
  }

 private:
  std::int64_t capacity_bits_;
  std::int64_t used_bits_ = 0;
  std::unordered_map<FlowId, FlowRule, FlowIdHash> entries_;
};

struct PoolRecord {
  std::int64_t freq = 0;
  double last_seen = 0.0;
};

// Flows observed by the controller during the orchestration window.
class FlowPool {
 public:
  void record(const FlowId& id, double now, std::int64_t matches = 1);
  // Direct insertion, used by loaders and tests.
  void set(const FlowId& id, PoolRecord rec) { records_[id] = rec; }

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const PoolRecord* find(const FlowId& id) const;
  const std::map<FlowId, PoolRecord>& records() const { return records_; }

 private:
  std::map<FlowId, PoolRecord> records_;
};

inline constexpr int kThresholdStep = 10;
inline constexpr int kFreqThresholdMax = 200;
inline constexpr int kRecThresholdMax = 300;
inline constexpr int kFreqLevels = kFreqThresholdMax / kThresholdStep + 1;
inline constexpr int kRecLevels = kRecThresholdMax / kThresholdStep + 1;
inline constexpr int kNumStates = kFreqLevels * kRecLevels;

struct ThresholdConfig {
  int freq_threshold = 0;
  int recentness_threshold = 0;

  auto operator<=>(const ThresholdConfig&) const = default;
  bool operator==(const ThresholdConfig&) const = default;

  bool on_grid() const;
  int index() const;
  static ThresholdConfig from_index(int index);
};

// Which predicates take part in rule selection.
enum class ParamMode { kBoth, kFreqOnly, kRecentnessOnly };

std::string to_string(ParamMode mode);
std::optional<ParamMode> parse_param_mode(const std::string& text);

bool is_eligible(const PoolRecord& rec, const ThresholdConfig& thresholds,
                 double window_close, ParamMode mode = ParamMode::kBoth);

// Eligible flows ranked by (freq desc, recentness asc, FlowId) and
// truncated to the table's entry capacity.
std::vector<FlowId> select_rules(const FlowPool& pool,
                                 const ThresholdConfig& thresholds,
                                 std::int64_t capacity_bits,
                                 double window_close,
                                 ParamMode mode = ParamMode::kBoth);

// `flow_id,freq,last_seen` per line.
void write_pool(std::ostream& out, const FlowPool& pool);
FlowPool read_pool(std::istream& in);

}  // namespace flowrl

#endif  // FLOWRL_FLOW_HPP_

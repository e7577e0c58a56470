#include "flowrl/flow.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include "flowrl/error.hpp"
#include "flowrl/textio.hpp"

namespace flowrl {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool port_ok(int port) { return port >= 1 && port <= 65535; }

}  // namespace

bool FlowId::valid() const {
  return src_host >= 0 && dst_host >= 0 && src_host != dst_host &&
         src_host <= 0xffff && dst_host <= 0xffff && port_ok(src_port) &&
         port_ok(dst_port);
}

std::uint64_t FlowId::pack() const {
  return (static_cast<std::uint64_t>(src_host & 0xffff) << 48) |
         (static_cast<std::uint64_t>(dst_host & 0xffff) << 32) |
         (static_cast<std::uint64_t>(src_port & 0xffff) << 16) |
         static_cast<std::uint64_t>(dst_port & 0xffff);
}

std::string to_string(const FlowId& id) {
  return std::to_string(id.src_host) + "-" + std::to_string(id.dst_host) +
         "-" + std::to_string(id.src_port) + "-" +
         std::to_string(id.dst_port) + "-tcp";
}

std::optional<FlowId> parse_flow_id(const std::string& text) {
  auto parts = split(trim(text), '-');
  if (parts.size() != 5 || parts[4] != "tcp") return std::nullopt;
  std::int64_t v[4];
  for (int i = 0; i < 4; ++i) {
    if (!parse_int(parts[i], &v[i])) return std::nullopt;
  }
  FlowId id{static_cast<int>(v[0]), static_cast<int>(v[1]),
            static_cast<int>(v[2]), static_cast<int>(v[3]), Protocol::kTcp};
  if (!id.valid()) return std::nullopt;
  return id;
}

std::size_t FlowIdHash::operator()(const FlowId& id) const {
  return static_cast<std::size_t>(mix64(id.pack()));
}

FlowTable::FlowTable(std::int64_t capacity_bits)
    : capacity_bits_(std::max<std::int64_t>(capacity_bits, 0)) {}

std::size_t FlowTable::max_entries() const {
  return static_cast<std::size_t>(capacity_bits_ / kRuleSizeBits);
}

const FlowRule* FlowTable::find(const FlowId& id) const {
  auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second;
}

void FlowTable::insert(const FlowRule& rule) {
  if (entries_.count(rule.id) != 0) {
    throw Error(ErrorCode::kDuplicateRule, to_string(rule.id));
  }
  if (used_bits() + rule.size_bits > capacity_bits_) {
    throw Error(ErrorCode::kCapacityExceeded,
                "inserting " + to_string(rule.id) + " would exceed " +
                    std::to_string(capacity_bits_) + " bits");
  }
  entries_.emplace(rule.id, rule);
  used_bits_ += rule.size_bits;
}

void FlowTable::erase(const FlowId& id) {
  auto it = entries_.find(id);
  if (it == entries_.end()) return;
  used_bits_ -= it->second.size_bits;
  entries_.erase(it);
}

LookupResult FlowTable::lookup(const FlowId& id, double now,
                               std::int64_t packets) {
  auto it = entries_.find(id);
  if (it == entries_.end()) return LookupResult::kMiss;
  it->second.match_count += packets;
  it->second.last_match_time = now;
  return LookupResult::kHit;
}

void FlowPool::record(const FlowId& id, double now, std::int64_t matches) {
  PoolRecord& rec = records_[id];
  rec.freq += matches;
  rec.last_seen = now;
}

const PoolRecord* FlowPool::find(const FlowId& id) const {
  auto it = records_.find(id);
  return it == records_.end() ? nullptr : &it->second;
}

bool ThresholdConfig::on_grid() const {
  return freq_threshold >= 0 && freq_threshold <= kFreqThresholdMax &&
         freq_threshold % kThresholdStep == 0 && recentness_threshold >= 0 &&
         recentness_threshold <= kRecThresholdMax &&
         recentness_threshold % kThresholdStep == 0;
}

int ThresholdConfig::index() const {
  return (freq_threshold / kThresholdStep) * kRecLevels +
         recentness_threshold / kThresholdStep;
}

ThresholdConfig ThresholdConfig::from_index(int index) {
  return {(index / kRecLevels) * kThresholdStep,
          (index % kRecLevels) * kThresholdStep};
}

std::string to_string(ParamMode mode) {
  switch (mode) {
    case ParamMode::kBoth: return "both";
    case ParamMode::kFreqOnly: return "freq_only";
    case ParamMode::kRecentnessOnly: return "recentness_only";
  }
  return "both";
}

std::optional<ParamMode> parse_param_mode(const std::string& text) {
  if (text == "both") return ParamMode::kBoth;
  if (text == "freq_only") return ParamMode::kFreqOnly;
  if (text == "recentness_only") return ParamMode::kRecentnessOnly;
  return std::nullopt;
}

bool is_eligible(const PoolRecord& rec, const ThresholdConfig& thresholds,
                 double window_close, ParamMode mode) {
  bool by_freq = rec.freq >= thresholds.freq_threshold;
  bool by_rec =
      window_close - rec.last_seen <= thresholds.recentness_threshold;
  switch (mode) {
    case ParamMode::kFreqOnly: return by_freq;
    case ParamMode::kRecentnessOnly: return by_rec;
    case ParamMode::kBoth: break;
  }
  return by_freq || by_rec;
}

std::vector<FlowId> select_rules(const FlowPool& pool,
                                 const ThresholdConfig& thresholds,
                                 std::int64_t capacity_bits,
                                 double window_close, ParamMode mode) {
  struct Candidate {
    std::int64_t freq;
    double recentness;
    FlowId id;
  };
  std::vector<Candidate> eligible;
  for (const auto& [id, rec] : pool.records()) {
    if (is_eligible(rec, thresholds, window_close, mode)) {
      eligible.push_back({rec.freq, window_close - rec.last_seen, id});
    }
  }
  std::size_t limit = capacity_bits <= 0
                          ? 0
                          : static_cast<std::size_t>(capacity_bits /
                                                     kRuleSizeBits);
  auto better = [](const Candidate& a, const Candidate& b) {
    if (a.freq != b.freq) return a.freq > b.freq;
    if (a.recentness != b.recentness) return a.recentness < b.recentness;
    return a.id < b.id;
  };
  if (eligible.size() > limit) {
    std::partial_sort(eligible.begin(), eligible.begin() + limit,
                      eligible.end(), better);
    eligible.resize(limit);
  } else {
    std::sort(eligible.begin(), eligible.end(), better);
  }
  std::vector<FlowId> out;
  out.reserve(eligible.size());
  for (const auto& c : eligible) out.push_back(c.id);
  return out;
}

void write_pool(std::ostream& out, const FlowPool& pool) {
  for (const auto& [id, rec] : pool.records()) {
    out << to_string(id) << ',' << rec.freq << ','
        << format_exact(rec.last_seen) << '\n';
  }
}

FlowPool read_pool(std::istream& in) {
  FlowPool pool;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto parts = split(body, ',');
    std::int64_t freq = 0;
    double last = 0.0;
    std::optional<FlowId> id;
    if (parts.size() == 3) id = parse_flow_id(parts[0]);
    if (!id || !parse_int(parts[1], &freq) || freq < 1 ||
        !parse_double(parts[2], &last)) {
      throw Error(ErrorCode::kParseError,
                  "pool line " + std::to_string(line_no), "core-model");
    }
    pool.set(*id, {freq, last});
  }
  return pool;
}

}  // namespace flowrl

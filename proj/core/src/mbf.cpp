#include "flowrl/mbf.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <unordered_map>
#include <utility>

namespace flowrl {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

BloomFilter::BloomFilter(int bits, int hashes, std::uint64_t seed)
    : bits_(bits > 0 ? bits : 1),
      hashes_(hashes > 0 ? hashes : 1),
      seed_(seed),
      words_((static_cast<std::size_t>(bits_) + 63) / 64, 0) {}

std::size_t BloomFilter::position(const FlowId& id, int k) const {
  // Double hashing: h1 + k * h2, with h2 odd.
  std::uint64_t key = id.pack();
  std::uint64_t h1 = mix64(key ^ seed_);
  std::uint64_t h2 = mix64(key ^ mix64(seed_ + 1)) | 1ULL;
  return static_cast<std::size_t>((h1 + static_cast<std::uint64_t>(k) * h2) %
                                  static_cast<std::uint64_t>(bits_));
}

void BloomFilter::insert(const FlowId& id) {
  for (int k = 0; k < hashes_; ++k) {
    std::size_t p = position(id, k);
    words_[p / 64] |= 1ULL << (p % 64);
  }
}

bool BloomFilter::contains(const FlowId& id) const {
  for (int k = 0; k < hashes_; ++k) {
    std::size_t p = position(id, k);
    if ((words_[p / 64] & (1ULL << (p % 64))) == 0) return false;
  }
  return true;
}

void BloomFilter::clear() { std::fill(words_.begin(), words_.end(), 0); }

MbfState::MbfState(MbfConfig cfg) : cfg_(std::move(cfg)) {
  for (int i = 0; i < cfg_.filters; ++i) {
    filters_.emplace_back(cfg_.bits, cfg_.hashes, cfg_.hash_seed);
  }
}

void MbfState::shift() {
  if (filters_.empty()) return;
  BloomFilter oldest = std::move(filters_.back());
  filters_.pop_back();
  oldest.clear();
  filters_.insert(filters_.begin(), std::move(oldest));
}

void MbfState::step(const std::vector<FlowId>& matched, double tick) {
  auto target = static_cast<std::int64_t>(std::floor(tick / cfg_.window));
  std::int64_t gap = target - window_index_;
  if (gap > 0) {
    std::int64_t n = std::min<std::int64_t>(gap, cfg_.filters);
    for (std::int64_t i = 0; i < n; ++i) shift();
    window_index_ = target;
  }
  if (filters_.empty()) return;
  for (const FlowId& id : matched) filters_.front().insert(id);
}

int MbfState::importance(const FlowId& id) const {
  int score = 0;
  for (std::size_t j = 0; j < filters_.size(); ++j) {
    if (filters_[j].contains(id) && j < cfg_.weights.size()) {
      score += cfg_.weights[j];
    }
  }
  return score;
}

bool MbfState::in_filter(int slot, const FlowId& id) const {
  return filters_.at(static_cast<std::size_t>(slot)).contains(id);
}

void mbf_step(MbfState& state, const std::vector<FlowId>& matched, double tick) {
  state.step(matched, tick);
}

int mbf_importance(const MbfState& state, const FlowId& id) {
  return state.importance(id);
}

EpisodeMetrics run_mbf_episode(const FlowSchedule& schedule, FlowTable& table,
                               const MbfConfig& cfg) {
  MbfState mbf(cfg);
  EpisodeMetrics m;
  auto end = static_cast<std::int64_t>(std::ceil(schedule.horizon));
  std::unordered_map<FlowId, int, FlowIdHash> score;

  for (std::int64_t tick = 0; tick < end; ++tick) {
    double now = static_cast<double>(tick);
    std::vector<TickEmission> active = packets_for_tick(schedule, tick);
    std::vector<FlowId> ids;
    ids.reserve(active.size());
    for (const auto& e : active) ids.push_back(e.id);
    mbf.step(ids, now);

    // Importance only changes at step(), so score residents once per tick.
    score.clear();
    for (const auto& [id, rule] : table.entries()) {
      score[id] = mbf.importance(id);
    }

    std::vector<std::int64_t> left;
    left.reserve(active.size());
    std::int64_t pending = 0;
    for (const auto& e : active) {
      left.push_back(e.packets);
      pending += e.packets;
    }
    while (pending > 0) {
      for (std::size_t i = 0; i < active.size(); ++i) {
        if (left[i] == 0) continue;
        --left[i];
        --pending;
        const FlowId& id = active[i].id;
        ++m.total_lookups;
        if (table.lookup(id, now) == LookupResult::kHit) {
          ++m.hits;
          continue;
        }
        ++m.misses;
        if (table.max_entries() == 0) continue;
        if (table.full()) {
          const FlowRule* victim = nullptr;
          int victim_score = 0;
          for (const auto& [rid, rule] : table.entries()) {
            int s = score[rid];
            if (victim == nullptr ||
                std::tie(s, rule.install_time, rule.id) <
                    std::tie(victim_score, victim->install_time, victim->id)) {
              victim = &rule;
              victim_score = s;
            }
          }
          FlowId gone = victim->id;
          table.erase(gone);
          score.erase(gone);
        }
        table.insert(FlowRule{id, kRuleSizeBits, 0, now, now});
        score[id] = mbf.importance(id);
      }
    }
  }
  m.overhead = m.misses;
  m.duration = static_cast<double>(end);
  return m;
}

}  // namespace flowrl

#ifndef FLOWRL_TRAFFIC_HPP_
#define FLOWRL_TRAFFIC_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "flowrl/flow.hpp"

namespace flowrl {

struct TrafficProfile {
  double elephant_fraction = 0.1;
  std::int64_t mice_size = 262144;         // bytes
  std::int64_t elephant_size = 26843546;   // bytes
  double aggregate_rate = 310e6;           // bits/s
  std::int64_t packet_size = 1500;         // bytes
  double per_flow_rate = 10e6;             // bits/s

  // Throws InvalidProfile.
  void validate() const;
  // Packets a flow emits in one fully active one-second tick.
  std::int64_t packets_per_tick() const;
  // Mean flow arrival rate (flows/s) that offers aggregate_rate on average.
  double arrival_rate() const;

  bool operator==(const TrafficProfile&) const = default;
};

enum class FlowClass { kMice, kElephant };

struct FlowSpec {
  FlowId id;
  FlowClass cls = FlowClass::kMice;
  std::int64_t size = 0;  // bytes
  double start = 0.0;
  double duration = 0.0;
};

struct FlowSchedule {
  std::vector<FlowSpec> flows;  // sorted by start
  double horizon = 0.0;
  std::uint64_t seed = 0;
  TrafficProfile profile;

  std::int64_t total_packets(const FlowSpec& flow) const;
  // First tick at which the flow emits.
  std::int64_t first_tick(const FlowSpec& flow) const;
  // Packets the flow emits during `tick`.
  std::int64_t packets_at(const FlowSpec& flow, std::int64_t tick) const;
};

FlowSchedule generate_schedule(const TrafficProfile& profile, double horizon,
                               int n_hosts, std::uint64_t seed);

struct TickEmission {
  FlowId id;
  std::int64_t packets = 0;
  std::size_t flow_index = 0;
};

// Flows emitting during `tick`, in schedule order.
std::vector<TickEmission> packets_for_tick(const FlowSchedule& schedule,
                                           std::int64_t tick);

std::string to_string(FlowClass cls);

// A `#` header with horizon, seed and profile, then
// `start,src,dst,sport,dport,class,size` per flow.
void write_schedule(std::ostream& out, const FlowSchedule& schedule);
FlowSchedule read_schedule(std::istream& in);

}  // namespace flowrl

#endif  // FLOWRL_TRAFFIC_HPP_

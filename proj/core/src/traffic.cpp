#include "flowrl/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <string>

#include "flowrl/error.hpp"
#include "flowrl/textio.hpp"

namespace flowrl {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidProfile, what);
}

}  // namespace

void TrafficProfile::validate() const {
  if (!(elephant_fraction >= 0.0 && elephant_fraction <= 1.0)) {
    invalid("elephant_fraction must lie in [0, 1]");
  }
  if (mice_size <= 0) invalid("mice_size must be positive");
  if (elephant_size <= 0) invalid("elephant_size must be positive");
  if (!(aggregate_rate > 0.0) || !std::isfinite(aggregate_rate)) {
    invalid("aggregate_rate must be positive");
  }
  if (packet_size <= 0) invalid("packet_size must be positive");
  if (!(per_flow_rate > 0.0) || !std::isfinite(per_flow_rate)) {
    invalid("per_flow_rate must be positive");
  }
}

std::int64_t TrafficProfile::packets_per_tick() const {
  auto n = static_cast<std::int64_t>(
      std::llround(per_flow_rate / (static_cast<double>(packet_size) * 8.0)));
  return std::max<std::int64_t>(n, 1);
}

double TrafficProfile::arrival_rate() const {
  double mean_bits = 8.0 * (elephant_fraction * elephant_size +
                            (1.0 - elephant_fraction) * mice_size);
  return aggregate_rate / mean_bits;
}

std::int64_t FlowSchedule::total_packets(const FlowSpec& flow) const {
  return ceil_div(flow.size, profile.packet_size);
}

std::int64_t FlowSchedule::first_tick(const FlowSpec& flow) const {
  return static_cast<std::int64_t>(std::ceil(flow.start));
}

std::int64_t FlowSchedule::packets_at(const FlowSpec& flow,
                                      std::int64_t tick) const {
  std::int64_t first = first_tick(flow);
  if (tick < first) return 0;
  std::int64_t per_tick = profile.packets_per_tick();
  std::int64_t total = total_packets(flow);
  // Compare as ticks to stay clear of overflow on very long horizons.
  std::int64_t full_ticks = total / per_tick;
  std::int64_t elapsed = tick - first;
  if (elapsed < full_ticks) return per_tick;
  if (elapsed == full_ticks) return total - full_ticks * per_tick;
  return 0;
}

FlowSchedule generate_schedule(const TrafficProfile& profile, double horizon,
                               int n_hosts, std::uint64_t seed) {
  profile.validate();
  if (!(horizon > 0.0)) invalid("horizon must be positive");
  if (n_hosts < 2) invalid("n_hosts must be at least 2");

  FlowSchedule schedule;
  schedule.horizon = horizon;
  schedule.seed = seed;
  schedule.profile = profile;

  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gap(profile.arrival_rate());
  std::bernoulli_distribution elephant(profile.elephant_fraction);
  std::uniform_int_distribution<int> src_dist(0, n_hosts - 1);
  std::uniform_int_distribution<int> dst_dist(0, n_hosts - 2);
  std::uniform_int_distribution<int> sport_dist(1024, 65535);
  std::uniform_int_distribution<int> dport_dist(1, 65535);

  std::set<FlowId> used;
  double t = gap(rng);
  while (t < horizon) {
    FlowSpec spec;
    spec.start = t;
    bool is_elephant = elephant(rng);
    spec.cls = is_elephant ? FlowClass::kElephant : FlowClass::kMice;
    spec.size = is_elephant ? profile.elephant_size : profile.mice_size;
    spec.duration =
        static_cast<double>(spec.size) * 8.0 / profile.per_flow_rate;
    int src = src_dist(rng);
    int dst = dst_dist(rng);
    if (dst >= src) ++dst;
    do {
      spec.id = FlowId{src, dst, sport_dist(rng), dport_dist(rng),
                       Protocol::kTcp};
    } while (!used.insert(spec.id).second);
    schedule.flows.push_back(spec);
    t += gap(rng);
  }
  return schedule;
}

std::vector<TickEmission> packets_for_tick(const FlowSchedule& schedule,
                                           std::int64_t tick) {
  std::vector<TickEmission> out;
  for (std::size_t i = 0; i < schedule.flows.size(); ++i) {
    const FlowSpec& flow = schedule.flows[i];
    if (flow.start > static_cast<double>(tick)) break;
    std::int64_t n = schedule.packets_at(flow, tick);
    if (n > 0) out.push_back({flow.id, n, i});
  }
  return out;
}

std::string to_string(FlowClass cls) {
  return cls == FlowClass::kElephant ? "elephant" : "mice";
}

void write_schedule(std::ostream& out, const FlowSchedule& schedule) {
  const TrafficProfile& p = schedule.profile;
  out << "# horizon=" << format_exact(schedule.horizon)
      << " seed=" << schedule.seed
      << " elephant_fraction=" << format_exact(p.elephant_fraction)
      << " mice_size=" << p.mice_size << " elephant_size=" << p.elephant_size
      << " aggregate_rate=" << format_exact(p.aggregate_rate)
      << " packet_size=" << p.packet_size
      << " per_flow_rate=" << format_exact(p.per_flow_rate) << '\n';
  for (const FlowSpec& f : schedule.flows) {
    out << format_exact(f.start) << ',' << f.id.src_host << ','
        << f.id.dst_host << ',' << f.id.src_port << ',' << f.id.dst_port << ','
        << to_string(f.cls) << ',' << f.size << '\n';
  }
}

FlowSchedule read_schedule(std::istream& in) {
  auto fail = [](int line_no, const std::string& why) {
    throw Error(ErrorCode::kParseError,
                "schedule line " + std::to_string(line_no) + ": " + why,
                "traffic");
  };
  FlowSchedule schedule;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      for (const auto& token : split(trim(body.substr(1)), ' ')) {
        auto kv = split(token, '=');
        if (kv.size() != 2) continue;
        const std::string& k = kv[0];
        double d = 0.0;
        std::int64_t i = 0;
        bool ok = true;
        if (k == "horizon") {
          ok = parse_double(kv[1], &schedule.horizon);
        } else if (k == "seed") {
          ok = parse_int(kv[1], &i);
          schedule.seed = static_cast<std::uint64_t>(i);
        } else if (k == "elephant_fraction") {
          ok = parse_double(kv[1], &schedule.profile.elephant_fraction);
        } else if (k == "mice_size") {
          ok = parse_int(kv[1], &schedule.profile.mice_size);
        } else if (k == "elephant_size") {
          ok = parse_int(kv[1], &schedule.profile.elephant_size);
        } else if (k == "aggregate_rate") {
          ok = parse_double(kv[1], &schedule.profile.aggregate_rate);
        } else if (k == "packet_size") {
          ok = parse_int(kv[1], &schedule.profile.packet_size);
        } else if (k == "per_flow_rate") {
          ok = parse_double(kv[1], &d);
          schedule.profile.per_flow_rate = d;
        }
        if (!ok) fail(line_no, "bad header value for " + k);
      }
      continue;
    }
    auto parts = split(body, ',');
    if (parts.size() != 7) fail(line_no, "expected 7 fields");
    FlowSpec f;
    std::int64_t v[4];
    if (!parse_double(parts[0], &f.start)) fail(line_no, "bad start");
    for (int k = 0; k < 4; ++k) {
      if (!parse_int(parts[k + 1], &v[k])) fail(line_no, "bad integer field");
    }
    f.id = FlowId{static_cast<int>(v[0]), static_cast<int>(v[1]),
                  static_cast<int>(v[2]), static_cast<int>(v[3]),
                  Protocol::kTcp};
    if (!f.id.valid()) fail(line_no, "invalid flow id");
    if (parts[5] == "elephant") {
      f.cls = FlowClass::kElephant;
    } else if (parts[5] == "mice") {
      f.cls = FlowClass::kMice;
    } else {
      fail(line_no, "unknown class " + parts[5]);
    }
    if (!parse_int(parts[6], &f.size) || f.size <= 0) fail(line_no, "bad size");
    if (!schedule.flows.empty() && f.start < schedule.flows.back().start) {
      fail(line_no, "starts must be non-decreasing");
    }
    schedule.flows.push_back(f);
  }
  schedule.profile.validate();
  for (FlowSpec& f : schedule.flows) {
    f.duration = static_cast<double>(f.size) * 8.0 /
                 schedule.profile.per_flow_rate;
  }
  return schedule;
}

}  // namespace flowrl

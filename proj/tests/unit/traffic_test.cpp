#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "flowrl/error.hpp"
#include "flowrl/traffic.hpp"

namespace flowrl {
namespace {

std::int64_t emitted(const FlowSchedule& s, const FlowSpec& f) {
  std::int64_t sum = 0;
  for (std::int64_t t = s.first_tick(f); t < s.first_tick(f) + 100000; ++t) {
    std::int64_t n = s.packets_at(f, t);
    if (n == 0) break;
    sum += n;
  }
  return sum;
}

TEST(Schedule, DeterministicInSeed) {
  TrafficProfile p;
  auto a = generate_schedule(p, 30, 20, 5);
  auto b = generate_schedule(p, 30, 20, 5);
  std::stringstream sa, sb;
  write_schedule(sa, a);
  write_schedule(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  auto c = generate_schedule(p, 30, 20, 6);
  std::stringstream sc;
  write_schedule(sc, c);
  EXPECT_NE(sa.str(), sc.str());
}

TEST(Schedule, StructuralInvariants) {
  TrafficProfile p;
  auto s = generate_schedule(p, 60, 20, 3);
  ASSERT_FALSE(s.flows.empty());
  std::set<FlowId> ids;
  for (std::size_t i = 0; i < s.flows.size(); ++i) {
    const FlowSpec& f = s.flows[i];
    ASSERT_TRUE(f.id.valid());
    ASSERT_LT(f.id.src_host, 20);
    ASSERT_LT(f.id.dst_host, 20);
    ASSERT_GE(f.start, 0.0);
    ASSERT_LT(f.start, 60.0);
    if (i > 0) {
      ASSERT_LE(s.flows[i - 1].start, f.start);
    }
    ASSERT_EQ(f.cls == FlowClass::kElephant, f.size == p.elephant_size);
    ASSERT_GT(f.duration, 0.0);
    ASSERT_TRUE(ids.insert(f.id).second);
  }
}

TEST(Schedule, ElephantCountOverThousandFlows) {
  TrafficProfile p;
  // Long enough horizon for at least 1000 flows; count the first 1000.
  auto s = generate_schedule(p, 2000, 20, 42);
  ASSERT_GE(s.flows.size(), 1000u);
  int elephants = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    elephants += s.flows[i].cls == FlowClass::kElephant;
  }
  EXPECT_GE(elephants, 70);
  EXPECT_LE(elephants, 130);
}

TEST(Schedule, ElephantFractionAndArrivalMeanOverManyFlows) {
  TrafficProfile p;
  const double mean_gap = 1.0 / p.arrival_rate();
  auto s = generate_schedule(p, 12000 * mean_gap, 20, 9);
  const double n = static_cast<double>(s.flows.size());
  ASSERT_GE(n, 10000);

  double elephants = 0;
  for (const auto& f : s.flows) elephants += f.cls == FlowClass::kElephant;
  const double sigma = std::sqrt(n * 0.1 * 0.9);
  EXPECT_LE(std::abs(elephants - 0.1 * n), 4 * sigma);

  // Mean inter-arrival gap, the first gap measured from 0.
  double mean = s.flows.back().start / n;
  EXPECT_NEAR(mean, mean_gap, 0.05 * mean_gap);
}

TEST(Schedule, ZeroElephantFractionGivesMiceOnly) {
  TrafficProfile p;
  p.elephant_fraction = 0.0;
  for (const auto& f : generate_schedule(p, 120, 5, 1).flows) {
    EXPECT_EQ(f.cls, FlowClass::kMice);
  }
}

TEST(Schedule, RejectsInvalidProfile) {
  auto code = [](auto mutate) {
    TrafficProfile p;
    mutate(p);
    try {
      generate_schedule(p, 10, 4, 1);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIoError;
  };
  EXPECT_EQ(code([](TrafficProfile& p) { p.elephant_fraction = 1.5; }),
            ErrorCode::kInvalidProfile);
  EXPECT_EQ(code([](TrafficProfile& p) { p.mice_size = 0; }),
            ErrorCode::kInvalidProfile);
  EXPECT_EQ(code([](TrafficProfile& p) { p.per_flow_rate = -1; }),
            ErrorCode::kInvalidProfile);
  EXPECT_EQ(code([](TrafficProfile& p) { p.aggregate_rate = NAN; }),
            ErrorCode::kInvalidProfile);
  EXPECT_THROW(generate_schedule(TrafficProfile{}, 10, 1, 1), Error);
  EXPECT_THROW(generate_schedule(TrafficProfile{}, 0, 4, 1), Error);
}

TEST(Emission, MiceFlowExhaustedInFirstTick) {
  FlowSchedule s;
  s.horizon = 10;
  FlowSpec f;
  f.size = 262144;
  f.start = 2.4;
  s.flows.push_back(f);
  EXPECT_EQ(s.profile.packets_per_tick(), 833);
  EXPECT_EQ(s.total_packets(f), 175);
  EXPECT_EQ(s.packets_at(f, 2), 0);  // before start
  EXPECT_EQ(s.packets_at(f, 3), 175);
  EXPECT_EQ(s.packets_at(f, 4), 0);

  auto tick3 = packets_for_tick(s, 3);
  ASSERT_EQ(tick3.size(), 1u);
  EXPECT_EQ(tick3[0].packets, 175);
  EXPECT_TRUE(packets_for_tick(s, 1).empty());
}

TEST(Emission, ConservationPerFlow) {
  for (std::uint64_t seed : {1, 2, 3}) {
    for (std::int64_t pkt : {1500, 9000, 131072}) {
      TrafficProfile p;
      p.packet_size = pkt;
      auto s = generate_schedule(p, 60, 20, seed);
      for (const auto& f : s.flows) {
        ASSERT_EQ(emitted(s, f), (f.size + pkt - 1) / pkt);
      }
    }
  }
}

TEST(Emission, ElephantSpansAboutItsDuration) {
  FlowSchedule s;
  FlowSpec f;
  f.size = s.profile.elephant_size;
  s.flows.push_back(f);
  std::int64_t ticks = 0;
  while (s.packets_at(f, ticks) > 0) ++ticks;
  EXPECT_EQ(ticks, 22);  // 17896 packets at 833 per tick
  EXPECT_NEAR(f.size * 8.0 / s.profile.per_flow_rate, 21.5, 0.1);
}

TEST(ScheduleIo, RoundTrip) {
  TrafficProfile p;
  p.packet_size = 4096;
  auto s = generate_schedule(p, 20, 6, 77);
  std::stringstream buf;
  write_schedule(buf, s);
  FlowSchedule back = read_schedule(buf);
  EXPECT_EQ(back.horizon, s.horizon);
  EXPECT_EQ(back.seed, s.seed);
  EXPECT_EQ(back.profile.packet_size, 4096);
  ASSERT_EQ(back.flows.size(), s.flows.size());
  for (std::size_t i = 0; i < s.flows.size(); ++i) {
    EXPECT_EQ(back.flows[i].id, s.flows[i].id);
    EXPECT_EQ(back.flows[i].start, s.flows[i].start);
    EXPECT_EQ(back.flows[i].size, s.flows[i].size);
    EXPECT_EQ(back.flows[i].cls, s.flows[i].cls);
  }
}

TEST(ScheduleIo, RejectsBadRows) {
  std::stringstream bad("# horizon=10 seed=1\n1.0,0,1,2000,80,mice\n");
  EXPECT_THROW(read_schedule(bad), Error);
  std::stringstream cls("# horizon=10 seed=1\n1.0,0,1,2000,80,whale,5\n");
  EXPECT_THROW(read_schedule(cls), Error);
}

}  // namespace
}  // namespace flowrl

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "flowrl/dqn.hpp"
#include "flowrl/error.hpp"
#include "flowrl/mlp.hpp"

namespace flowrl {
namespace {

using testing::TableEnv;

// Forward pass written against the documented flat layout only.
std::vector<double> reference_forward(const std::vector<int>& sizes,
                                      const std::vector<double>& p,
                                      std::vector<double> x) {
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int in = sizes[l], out = sizes[l + 1];
    std::vector<double> y(out);
    for (int o = 0; o < out; ++o) {
      double acc = p[off + static_cast<std::size_t>(out) * in + o];
      for (int i = 0; i < in; ++i) acc += p[off + static_cast<std::size_t>(o) * in + i] * x[i];
      y[o] = (l + 2 < sizes.size() && acc < 0) ? 0.0 : acc;
    }
    off += static_cast<std::size_t>(out) * in + out;
    x = std::move(y);
  }
  return x;
}

double loss_at(const Mlp& net, const std::vector<double>& x, int a, double t) {
  double d = t - mlp_forward(net, x)[a];
  return d * d;
}

std::vector<double> random_input(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(rng), u(rng), u(rng), u(rng)};
}

TEST(Relu, Branches) {
  EXPECT_EQ(relu(-1.0), 0.0);
  EXPECT_EQ(relu(0.0), 0.0);
  EXPECT_EQ(relu(2.5), 2.5);
  for (double x : {-3.0, -1e-300, 0.0, 1e-300, 7.0}) {
    EXPECT_GE(relu(x), 0.0);
    EXPECT_EQ(relu(relu(x)), relu(x));
  }
}

TEST(Mlp, ShapesAndZeroNet) {
  Mlp net(kQNetLayers);
  EXPECT_EQ(net.num_layers(), 4);
  EXPECT_EQ(net.num_params(), 4u * 24 + 24 + 24 * 24 + 24 + 24 * 24 + 24 + 24 * 5 + 5);
  auto y = mlp_forward(net, {0.3, -2, 5, 1});
  EXPECT_EQ(y, std::vector<double>(5, 0.0));
}

TEST(Mlp, HandEvaluatedHiddenUnit) {
  Mlp net({4, 1, 1});
  net.weight(0, 0, 0) = 1.0;
  net.weight(0, 0, 1) = -1.0;
  net.weight(1, 0, 0) = 1.0;
  EXPECT_EQ(mlp_forward(net, {2, 5, 0, 0})[0], 0.0);  // pre-activation -3
  EXPECT_EQ(mlp_forward(net, {5, 2, 0, 0})[0], 3.0);
  net.bias(1, 0) = -0.5;
  EXPECT_EQ(mlp_forward(net, {5, 2, 0, 0})[0], 2.5);
}

TEST(Mlp, MatchesStraightLineImplementation) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    Mlp net = Mlp::random(kQNetLayers, 0.5, rng);
    for (int k = 0; k < 20; ++k) {
      auto x = random_input(rng);
      auto got = mlp_forward(net, x);
      auto want = reference_forward(kQNetLayers, net.params(), x);
      ASSERT_EQ(got.size(), 5u);
      for (int a = 0; a < 5; ++a) ASSERT_NEAR(got[a], want[a], 1e-12);
    }
  }
}

TEST(Mlp, RandomInitWithinScale) {
  std::mt19937_64 rng(4);
  Mlp net = Mlp::random(kQNetLayers, 0.1, rng);
  for (double p : net.params()) {
    ASSERT_GE(p, -0.1);
    ASSERT_LE(p, 0.1);
  }
}

TEST(Mlp, RejectsBadInput) {
  Mlp net(kQNetLayers);
  try {
    mlp_forward(net, {0, std::numeric_limits<double>::quiet_NaN(), 0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFiniteInput);
    EXPECT_EQ(e.module(), "agent-dqn");
  }
  EXPECT_THROW(mlp_forward(net, {0, INFINITY, 0, 0}), Error);
  EXPECT_THROW(mlp_forward(net, {0, 0, 0}), Error);
}

TEST(Gradient, MatchesCentralDifferences) {
  const double h = 1e-5;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed * 7919);
    Mlp net = Mlp::random(kQNetLayers, 0.5, rng);
    auto x = random_input(rng);
    int a = static_cast<int>(rng() % 5);
    double t = std::uniform_real_distribution<double>(-2, 2)(rng);
    auto g = loss_gradient(net, x, a, t);
    ASSERT_EQ(g.size(), net.num_params());
    for (std::size_t i = 0; i < net.num_params(); ++i) {
      Mlp plus = net, minus = net;
      plus.params()[i] += h;
      minus.params()[i] -= h;
      double fd = (loss_at(plus, x, a, t) - loss_at(minus, x, a, t)) / (2 * h);
      double denom = std::max({std::abs(g[i]), std::abs(fd), 1e-8});
      ASSERT_LT(std::abs(g[i] - fd) / denom, 1e-4)
          << "seed " << seed << " param " << i << " analytic " << g[i] << " fd " << fd;
    }
  }
}

TEST(Gradient, OtherHeadsGetNoOutputGradient) {
  std::mt19937_64 rng(3);
  Mlp net = Mlp::random(kQNetLayers, 0.5, rng);
  auto x = random_input(rng);
  auto g = loss_gradient(net, x, 2, 1.0);
  Mlp layout(kQNetLayers);
  layout.params() = g;
  const int last = layout.num_layers() - 1;
  for (int o = 0; o < 5; ++o) {
    if (o == 2) continue;
    EXPECT_EQ(layout.bias(last, o), 0.0);
    for (int i = 0; i < 24; ++i) EXPECT_EQ(layout.weight(last, o, i), 0.0);
  }
}

TEST(Sgd, TargetAtCurrentValueLeavesNet) {
  std::mt19937_64 rng(5);
  Mlp net = Mlp::random(kQNetLayers, 0.5, rng);
  auto x = random_input(rng);
  Mlp before = net;
  sgd_step(net, x, 1, mlp_forward(net, x)[1], 0.01);
  EXPECT_EQ(net, before);
}

TEST(Sgd, SingleSampleRegressionConverges) {
  std::mt19937_64 rng(6);
  Mlp net = Mlp::random(kQNetLayers, 0.1, rng);
  std::vector<double> x{0.45, 0.1, 0.25, 1.0};
  const double target = 1.7;
  int steps = 0;
  while (std::abs(target - mlp_forward(net, x)[3]) >= 1e-3 && steps < 10000) {
    sgd_step(net, x, 3, target, 0.01);
    ++steps;
  }
  EXPECT_LT(std::abs(target - mlp_forward(net, x)[3]), 1e-3);
}

TEST(Sgd, OneStepDoesNotIncreaseLoss) {
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed + 1000);
    Mlp net = Mlp::random(kQNetLayers, 0.1, rng);
    auto x = random_input(rng);
    int a = static_cast<int>(rng() % 5);
    double t = std::uniform_real_distribution<double>(-1, 1)(rng);
    double before = loss_at(net, x, a, t);
    sgd_step(net, x, a, t, 0.01);
    double after = loss_at(net, x, a, t);
    if (after > before && before >= 1e-12) ++failures;
  }
  EXPECT_EQ(failures, 0);
}

TEST(MlpIo, RoundTripIsExact) {
  std::mt19937_64 rng(8);
  Mlp net = Mlp::random(kQNetLayers, 0.1, rng);
  net.params()[3] = 1.0 / 3.0;
  std::stringstream buf;
  write_mlp(buf, net);
  EXPECT_EQ(buf.str().substr(0, 20), "layers 4 24 24 24 5\n");
  EXPECT_EQ(read_mlp(buf), net);
}

TEST(MlpIo, RejectsTruncatedFile) {
  std::stringstream buf("layers 4 2 5\n0.5\n");
  EXPECT_THROW(read_mlp(buf), Error);
  std::stringstream header("sizes 4 5\n");
  EXPECT_THROW(read_mlp(header), Error);
}

TEST(Encode, DocumentedNormalization) {
  EXPECT_EQ(encode_state({90, 30}, ActionKind::kNoOp, {0}),
            (std::vector<double>{0.45, 0.1, 0.0, 0.0}));
  EXPECT_EQ(encode_state({0, 0}, ActionKind::kNoOp, {0}), std::vector<double>(4, 0.0));
  EXPECT_EQ(encode_state({200, 300}, ActionKind::kDecRec, {1}),
            std::vector<double>(4, 1.0));
  for (int i = 0; i < kNumStates; ++i) {
    for (int r = -1; r <= 1; ++r) {
      for (double v : encode_state(ThresholdConfig::from_index(i), ActionKind::kIncRec, {r})) {
        ASSERT_GE(v, -1.0);
        ASSERT_LE(v, 1.0);
      }
    }
  }
}

Mlp constant_heads(std::vector<double> heads) {
  Mlp net(kQNetLayers);
  for (int a = 0; a < 5; ++a) net.bias(net.num_layers() - 1, a) = heads[a];
  return net;
}

TEST(Target, BootstrapFromPreviousNet) {
  Experience e{std::vector<double>(4, 0.0), ActionKind::kNoOp, {1},
               std::vector<double>(4, 0.5)};
  EXPECT_NEAR(dqn_target(e, constant_heads({0, 2.0, -1, 0.5, 1}), 0.95), 2.9, 1e-12);
  e.r = {0};
  EXPECT_EQ(dqn_target(e, Mlp(kQNetLayers), 0.95), 0.0);
  e.r = {-1};
  EXPECT_NEAR(dqn_target(e, constant_heads({0, 0, 0, 0, 0}), 0.95), -1.0, 1e-12);
  // A mask limits the max to allowed heads.
  e.r = {0};
  EXPECT_NEAR(dqn_target(e, constant_heads({0, 2.0, -1, 0.5, 1}), 0.5,
                         actions_for(ParamMode::kRecentnessOnly)),
              0.5, 1e-12);
}

Experience numbered(int n) {
  return {std::vector<double>{static_cast<double>(n), 0, 0, 0}, ActionKind::kNoOp,
          {0}, std::vector<double>(4, 0.0)};
}

TEST(Replay, FifoBound) {
  ReplayMemory mem(1000);
  for (int i = 0; i < 1001; ++i) mem.store(numbered(i));
  EXPECT_EQ(mem.size(), 1000u);
  EXPECT_EQ(mem.contents().front().s[0], 1.0);
  EXPECT_EQ(mem.contents().back().s[0], 1000.0);
}

TEST(Replay, ExhaustiveSampleAndShortage) {
  ReplayMemory mem;
  for (int i = 0; i < 4; ++i) mem.store(numbered(i));
  std::mt19937_64 rng(1);
  auto got = mem.sample(4, rng);
  std::vector<double> ids;
  for (const auto& e : got) ids.push_back(e.s[0]);
  std::sort(ids.begin(), ids.end());
  EXPECT_EQ(ids, (std::vector<double>{0, 1, 2, 3}));
  try {
    mem.sample(5, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientExperiences);
  }
}

TEST(Replay, SamplingIsUniform) {
  ReplayMemory mem;
  for (int i = 0; i < 100; ++i) mem.store(numbered(i));
  std::mt19937_64 rng(99);
  std::vector<int> counts(100, 0);
  const int draws = 10000;
  for (int k = 0; k < draws; ++k) ++counts[static_cast<int>(mem.sample(1, rng)[0].s[0])];
  const double sigma = std::sqrt(draws * 0.01 * 0.99);
  for (int c : counts) EXPECT_LE(std::abs(c - 100.0), 3 * sigma);
}

TEST(Replay, MinibatchHasNoRepeats) {
  ReplayMemory mem;
  for (int i = 0; i < 6; ++i) mem.store(numbered(i));
  std::mt19937_64 rng(2);
  for (int k = 0; k < 500; ++k) {
    auto b = mem.sample(4, rng);
    std::vector<double> ids;
    for (const auto& e : b) ids.push_back(e.s[0]);
    std::sort(ids.begin(), ids.end());
    ASSERT_EQ(std::adjacent_find(ids.begin(), ids.end()), ids.end());
  }
}

TEST(DqnTrain, ReachesGoalAndIsDeterministic) {
  auto run = [] {
    TableEnv env(100);
    for (int f = 0; f <= 200; f += 10) {
      for (int r = 0; r <= 300; r += 10) env.set({f, r}, 100 - f / 5 - r / 10);
    }
    std::mt19937_64 init(1), rng(2);
    Mlp net = make_qnet(0.1, init);
    ReplayMemory mem;
    DqnConfig cfg;
    cfg.episode_cap = 1000;
    auto r = dqn_train(env, net, mem, cfg, {0, 0}, rng);
    return std::make_tuple(r.goal_met, r.episodes_run, net, mem.size());
  };
  auto a = run();
  EXPECT_TRUE(std::get<0>(a));
  EXPECT_LE(std::get<3>(a), 1000u);
  EXPECT_EQ(a, run());
}

TEST(DqnTrain, LearnsOnlyAfterStartThreshold) {
  TableEnv env(100);
  std::mt19937_64 init(1), rng(2);
  Mlp net = make_qnet(0.1, init);
  Mlp before = net;
  ReplayMemory mem;
  DqnConfig cfg;
  cfg.episode_cap = 31;
  dqn_train(env, net, mem, cfg, {90, 30}, rng);
  EXPECT_EQ(mem.size(), 31u);
  EXPECT_EQ(net, before);
  cfg.episode_cap = 1;
  dqn_train(env, net, mem, cfg, {90, 30}, rng);
  EXPECT_NE(net, before);
}

TEST(DqnTrain, PretrainNeedsSets) {
  TableEnv env(100);
  std::mt19937_64 rng(1);
  Mlp net(kQNetLayers);
  ReplayMemory mem;
  try {
    pretrain_dqn(net, mem, {}, env, DqnConfig{}, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyTrainingSets);
    EXPECT_EQ(e.module(), "agent-dqn");
  }
}

}  // namespace
}  // namespace flowrl

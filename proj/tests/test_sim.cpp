#include <gtest/gtest.h>

#include <cstdlib>
#include <random>
#include <set>

#include "coopsim/analysis.hpp"
#include "coopsim/report_csv.hpp"
#include "coopsim/sim.hpp"

using namespace coopsim;

namespace {

ScenarioConfig collision_config(Strategy s, int n, std::int64_t slots, int reps = 1) {
  ScenarioConfig c;
  c.channel = table1_params(n, s == Strategy::TwoRelayClustered);
  c.strategy = s;
  c.horizon_slots = slots;
  c.warmup_slots = slots / 10;
  c.replications = reps;
  c.seed = 5;
  return c;
}

ScenarioConfig mpr_config(Strategy s, int n, double gamma, std::int64_t slots, int reps = 1) {
  ScenarioConfig c;
  c.channel = with_threshold(table2_topology(n, s == Strategy::TwoRelayClustered), gamma);
  c.strategy = s;
  c.horizon_slots = slots;
  c.warmup_slots = slots / 10;
  c.replications = reps;
  c.seed = 9;
  return c;
}

std::vector<ScenarioConfig> assorted_configs(std::int64_t slots) {
  return {
      collision_config(Strategy::NoRelay, 3, slots),
      collision_config(Strategy::OneRelay, 4, slots),
      collision_config(Strategy::TwoRelaySimple, 4, slots),
      collision_config(Strategy::TwoRelayClustered, 6, slots),
      collision_config(Strategy::DominantS1, 2, slots),
      collision_config(Strategy::DominantS2, 4, slots),
      mpr_config(Strategy::TwoRelaySimple, 6, 0.2, slots),
      mpr_config(Strategy::TwoRelaySimple, 10, 1.2, slots),
      mpr_config(Strategy::TwoRelaySmallerQueue, 8, 0.5, slots),
      mpr_config(Strategy::TwoRelayClustered, 8, 1.2, slots),
      mpr_config(Strategy::OneRelay, 5, 2.5, slots),
  };
}

std::string csv_of(const MetricsReport& r) {
  std::string out;
  for (const auto& row : report_rows(r)) out += format_row(row) + "\n";
  return out;
}

}  // namespace

TEST(Simulation, PacketConservation) {
  for (const auto& c : assorted_configs(20000)) {
    SCOPED_TRACE(std::string(to_string(c.strategy)) + " " + std::string(to_string(c.channel_kind())));
    SimTrace trace;
    const auto r = simulate_replication(c, 3, &trace);
    // Every issued packet is at its source, in a relay, or delivered.
    EXPECT_EQ(r.packets_issued,
              r.packets_delivered + r.packets_in_relays + static_cast<std::uint64_t>(c.n_users()));
    std::set<std::uint64_t> seen;
    for (const auto& slot : trace.slots)
      for (const auto& d : slot.deliveries) EXPECT_TRUE(seen.insert(d.packet_id).second);
    EXPECT_EQ(seen.size(), r.packets_delivered);
  }
}

TEST(Simulation, CollisionSlotInvariants) {
  for (Strategy s : {Strategy::TwoRelaySimple, Strategy::DominantS1, Strategy::TwoRelayClustered}) {
    const auto c = collision_config(s, 4, 50000);
    SimTrace trace;
    simulate_replication(c, 17, &trace);
    for (std::size_t t = 0; t < trace.slots.size(); ++t) {
      const auto& slot = trace.slots[t];
      if (s != Strategy::TwoRelayClustered && slot.transmissions.size() >= 2) {
        ASSERT_TRUE(slot.deliveries.empty());
        ASSERT_EQ(slot.arrivals[0] + slot.arrivals[1], 0);
      }
      if (t + 1 < trace.slots.size())
        for (int j = 0; j < kNumRelays; ++j) {
          const auto step = trace.slots[t + 1].queue_length[j] - slot.queue_length[j];
          ASSERT_GE(step, -1);
          ASSERT_LE(step, 1);
          ASSERT_EQ(step, slot.arrivals[j] - slot.departures[j]);
        }
    }
  }
}

// Under MPR a relay may decode several packets in one slot; each relay
// stores at most one per transmitting user and releases at most one.
TEST(Simulation, MprQueueStepsAreBounded) {
  const auto c = mpr_config(Strategy::TwoRelaySimple, 10, 0.2, 20000);
  SimTrace trace;
  simulate_replication(c, 2, &trace);
  for (const auto& slot : trace.slots) {
    int users_tx = 0;
    for (const auto& tx : slot.transmissions) users_tx += tx.transmitter.kind == NodeKind::User;
    for (int j = 0; j < kNumRelays; ++j) {
      ASSERT_LE(slot.arrivals[j], users_tx);
      ASSERT_LE(slot.departures[j], 1);
    }
  }
}

TEST(Simulation, DummyPacketsNeverCount) {
  const auto c = collision_config(Strategy::DominantS1, 2, 20000);
  SimTrace trace;
  simulate_replication(c, 4, &trace);
  int dummies = 0;
  for (const auto& slot : trace.slots) {
    for (const auto& tx : slot.transmissions) dummies += tx.packet.is_dummy();
    for (const auto& d : slot.deliveries) EXPECT_NE(d.packet_id, kDummyPacketId);
  }
  EXPECT_GT(dummies, 0);
}

TEST(Simulation, DeterministicGivenSeed) {
  for (const auto& c : assorted_configs(10000)) {
    EXPECT_EQ(simulate_replication(c, 123), simulate_replication(c, 123));
    EXPECT_NE(simulate_replication(c, 123).packets_issued + 1, 0u);
  }
  const auto c = mpr_config(Strategy::TwoRelaySmallerQueue, 6, 1.2, 5000);
  SimTrace a, b;
  simulate_replication(c, 8, &a);
  simulate_replication(c, 8, &b);
  ASSERT_EQ(a.slots.size(), b.slots.size());
  for (std::size_t t = 0; t < a.slots.size(); ++t) {
    EXPECT_EQ(a.slots[t].queue_length, b.slots[t].queue_length);
    EXPECT_EQ(a.slots[t].outcome.delivered_to_dest, b.slots[t].outcome.delivered_to_dest);
  }
}

TEST(Simulation, ParallelMatchesSerial) {
  setenv("COOPSIM_WORKERS", "3", 1);
  for (const auto& base : {collision_config(Strategy::TwoRelaySimple, 4, 20000, 5),
                           mpr_config(Strategy::TwoRelayClustered, 6, 1.2, 5000, 4)}) {
    EXPECT_EQ(csv_of(run(base)), csv_of(run_serial(base)));
    const std::vector<int> ns = {2, 4, 6};
    const std::vector<double> gammas = {0.2, 2.5};
    const auto par = sweep(base, ns, gammas);
    const auto ser = sweep_serial(base, ns, gammas);
    ASSERT_EQ(par.size(), ser.size());
    for (std::size_t k = 0; k < par.size(); ++k) EXPECT_EQ(csv_of(par[k]), csv_of(ser[k]));
  }
  unsetenv("COOPSIM_WORKERS");
}

TEST(Simulation, NoRelayThroughput) {
  const auto r = run(collision_config(Strategy::NoRelay, 2, 1'000'000, 4));
  const double want = analysis::no_relay_throughput(table1_params(2, false), 0);
  EXPECT_DOUBLE_EQ(want, 0.046875);
  for (const auto& e : r.throughput_per_user) EXPECT_NEAR(e.mean, want, 1.5 * e.ci_halfwidth);
  EXPECT_EQ(r.mean_queue[0].mean, 0.0);
}

TEST(Simulation, SilentUsers) {
  auto c = collision_config(Strategy::TwoRelaySimple, 3, 5000, 2);
  std::get<CollisionParams>(c.channel).q_user.assign(3, 0.0);
  const auto r = run(c);
  EXPECT_EQ(r.aggregate_throughput.mean, 0.0);
  for (int j = 0; j < kNumRelays; ++j) {
    EXPECT_EQ(r.mean_queue[j].mean, 0.0);
    EXPECT_EQ(r.empirical_p_empty[j].mean, 1.0);
    EXPECT_EQ(r.stability_verdict[j], StabilityVerdict::Stable);
  }
  EXPECT_TRUE(r.delay_low_confidence);
}

TEST(Simulation, AggregateIsSumOfUsers) {
  const auto r = run(mpr_config(Strategy::TwoRelaySimple, 6, 1.2, 20000, 3));
  double sum = 0.0;
  for (const auto& e : r.throughput_per_user) sum += e.mean;
  EXPECT_NEAR(r.aggregate_throughput.mean, sum, 1e-12);
  for (int j = 0; j < kNumRelays; ++j) {
    EXPECT_GE(r.empirical_lambda[j].mean, 0.0);
    EXPECT_LE(r.empirical_mu[j].mean, 1.0);
  }
}

TEST(Simulation, LittleLawBusyFraction) {
  const auto r = run(collision_config(Strategy::TwoRelaySimple, 4, 400000, 4));
  for (int j = 0; j < kNumRelays; ++j) {
    const double busy = 1.0 - r.empirical_p_empty[j].mean;
    const double ratio = r.empirical_lambda[j].mean / r.empirical_mu[j].mean;
    EXPECT_NEAR(busy, ratio, 0.02 * ratio + r.empirical_p_empty[j].ci_halfwidth);
  }
}

TEST(Simulation, DominantModeMatchesAnalysis) {
  const auto c = collision_config(Strategy::DominantS1, 2, 1'000'000, 2);
  const auto r = run(c);
  const auto a = analysis::dominant_rates_s1(std::get<CollisionParams>(c.channel));
  EXPECT_NEAR(r.empirical_lambda[1].mean, a.lambda, 0.03 * a.lambda);
  EXPECT_NEAR(r.empirical_p_empty[1].mean, a.p_empty, 0.02 * a.p_empty);
  EXPECT_NEAR(r.empirical_mu[1].mean, a.mu, 0.03 * a.mu);
}

// Dummy packets also block users, so relay arrivals in the dominant system
// are endogenous and the queues are not pathwise larger than in the
// original system. The coupled runs below exhibit such a slot.
TEST(Simulation, DominantSystemIsNotPathwiseLarger) {
  auto original = collision_config(Strategy::TwoRelaySimple, 2, 20000);
  auto dominant = original;
  dominant.strategy = Strategy::DominantS1;
  SimTrace a, b;
  simulate_replication(original, 1, &a);
  simulate_replication(dominant, 1, &b);
  bool smaller = false;
  for (std::size_t t = 0; t < a.slots.size() && !smaller; ++t)
    smaller = b.slots[t].queue_length[0] < a.slots[t].queue_length[0];
  EXPECT_TRUE(smaller);
}

// What the dominance argument does use: once R1 never empties, the original
// system is the dominant system, so R2 behaves identically in law.
TEST(Simulation, SaturatedRelayMakesSystemsIndistinguishable) {
  auto original = collision_config(Strategy::TwoRelaySimple, 2, 1'000'000, 2);
  auto& p = std::get<CollisionParams>(original.channel);
  p.q_relay[0] = analysis::q_min(p, 0) - 0.05;
  auto dominant = original;
  dominant.strategy = Strategy::DominantS1;
  const auto a = run(original);
  const auto b = run(dominant);
  const auto rates = analysis::dominant_rates_s1(p);
  for (const auto* r : {&a, &b}) {
    EXPECT_NEAR(r->empirical_lambda[1].mean, rates.lambda, 0.03 * rates.lambda);
    EXPECT_NEAR(r->empirical_p_empty[1].mean, rates.p_empty, 0.02 * rates.p_empty);
  }
}

TEST(StabilityProbe, FlipsAroundThreshold) {
  auto c = collision_config(Strategy::TwoRelaySimple, 2, 250000, 4);
  auto& p = std::get<CollisionParams>(c.channel);
  const double q = analysis::q_min(p, 0);
  p.q_relay[0] = q - 0.05;
  EXPECT_EQ(stability_probe(c).verdict[0], StabilityVerdict::Unstable);
  p.q_relay[0] = q + 0.05;
  EXPECT_EQ(stability_probe(c).verdict[0], StabilityVerdict::Stable);
}

TEST(StabilityProbe, SilentUsersAreStable) {
  auto c = collision_config(Strategy::TwoRelaySimple, 2, 10000, 3);
  std::get<CollisionParams>(c.channel).q_user = {0.0, 0.0};
  const auto probe = stability_probe(c, 1);
  EXPECT_EQ(probe.verdict[0], StabilityVerdict::Stable);
  EXPECT_EQ(probe.verdict[1], StabilityVerdict::Stable);
}

TEST(ClassifyTrend, Rules) {
  EXPECT_EQ(classify_trend({1e-3, 1e-4, 10, 40}), StabilityVerdict::Unstable);
  EXPECT_EQ(classify_trend({1e-6, 1e-5, 1.0, 1.1}), StabilityVerdict::Stable);
  EXPECT_EQ(classify_trend({1e-6, 1e-5, 1.0, 9.0}), StabilityVerdict::Inconclusive);
  EXPECT_EQ(classify_trend({-1e-3, 1e-4, 1.0, 0.5}), StabilityVerdict::Inconclusive);
}

TEST(Sweep, ShapeSeedsAndErrors) {
  const auto base = collision_config(Strategy::TwoRelayClustered, 2, 2000, 2);
  EXPECT_TRUE(sweep(base, std::vector<int>{}).empty());
  const std::vector<int> ns = {2, 4, 6};
  const auto out = sweep(base, ns);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[2].n_users, 6);
  EXPECT_EQ(out[1].seed, point_seed(base.seed, 4, std::nullopt, base.strategy));
  EXPECT_NE(point_seed(1, 4, 1.2, Strategy::OneRelay), point_seed(1, 4, 1.2, Strategy::NoRelay));
  EXPECT_NE(point_seed(1, 4, 1.2, Strategy::OneRelay), point_seed(1, 4, 2.5, Strategy::OneRelay));
  EXPECT_THROW(sweep(base, std::vector<int>{3, 5}), std::invalid_argument);

  const auto mpr = mpr_config(Strategy::TwoRelaySimple, 4, 1.2, 1000);
  const std::vector<double> gammas = {0.2, 1.2, 2.5};
  const auto grid = sweep(mpr, std::vector<int>{2, 6}, gammas);
  ASSERT_EQ(grid.size(), 6u);
  EXPECT_EQ(grid[4].gamma, 1.2);
  EXPECT_EQ(grid[4].n_users, 6);
}

TEST(Sweep, DerivedPointsCopyTemplates) {
  auto base = collision_config(Strategy::TwoRelayClustered, 4, 1000);
  auto& p = std::get<CollisionParams>(base.channel);
  p.q_user = {0.1, 0.1, 0.3, 0.3};
  const auto point = derive_point(base, 8, std::nullopt);
  const auto& q = std::get<CollisionParams>(point.channel);
  EXPECT_EQ(q.q_user, (std::vector<double>{0.1, 0.1, 0.1, 0.1, 0.3, 0.3, 0.3, 0.3}));
  EXPECT_EQ(*q.cluster_of, (std::vector<int>{0, 0, 0, 0, 1, 1, 1, 1}));
  EXPECT_TRUE(validate(point).ok());
}

// Random valid scenarios: the run completes and every rate is a probability.
TEST(Simulation, FuzzValidConfigs) {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 40; ++k) {
    ScenarioConfig c;
    const int n = 2 * (1 + static_cast<int>(gen() % 4));
    const bool mpr = gen() % 2 == 0;
    const std::vector<Strategy> strategies =
        mpr ? std::vector<Strategy>{Strategy::NoRelay, Strategy::OneRelay, Strategy::TwoRelaySimple,
                                    Strategy::TwoRelaySmallerQueue, Strategy::TwoRelayClustered}
            : std::vector<Strategy>{Strategy::NoRelay, Strategy::OneRelay, Strategy::TwoRelaySimple,
                                    Strategy::TwoRelayClustered, Strategy::DominantS1,
                                    Strategy::DominantS2};
    c.strategy = strategies[gen() % strategies.size()];
    const bool clustered = c.strategy == Strategy::TwoRelayClustered;
    if (mpr) {
      auto p = with_threshold(table2_topology(n, clustered), 0.1 + 3 * u(gen));
      for (auto& q : p.q_user) q = u(gen);
      p.q_relay = {u(gen), u(gen)};
      c.channel = p;
    } else {
      auto p = table1_params(n, clustered);
      for (auto& q : p.q_user) q = u(gen);
      for (auto& x : p.p_user_dest) x = u(gen);
      p.q_relay = {u(gen), u(gen)};
      p.p_relay_dest = {u(gen), u(gen)};
      c.channel = p;
    }
    c.horizon_slots = 3000;
    c.warmup_slots = 300;
    c.replications = 2;
    c.seed = gen();
    ASSERT_TRUE(validate(c).ok()) << validate(c).describe();
    const auto r = run(c);
    SCOPED_TRACE(csv_of(r));
    auto in_unit = [](const Estimate& e) { return !(e.mean < 0.0) && !(e.mean > 1.0); };
    for (const auto& e : r.throughput_per_user) EXPECT_TRUE(in_unit(e));
    for (int j = 0; j < kNumRelays; ++j) {
      EXPECT_TRUE(in_unit(r.empirical_lambda[j]));
      EXPECT_TRUE(in_unit(r.empirical_mu[j]));
      EXPECT_TRUE(in_unit(r.empirical_p_empty[j]));
    }
  }
}

TEST(Simulation, RejectsInvalidConfig) {
  auto c = collision_config(Strategy::TwoRelaySimple, 2, 1000);
  c.replications = 0;
  EXPECT_THROW(run(c), std::invalid_argument);
  EXPECT_THROW(run_serial(c), std::invalid_argument);
}

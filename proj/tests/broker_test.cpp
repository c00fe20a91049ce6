#include <algorithm>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "brokersim/broker.hpp"
#include "brokersim/simulation.hpp"

namespace brokersim {
namespace {

BrokerState fresh(BrokerPolicy p, std::size_t dcs = 3, std::int64_t vms = 25) {
  BrokerParams params;
  params.policy = p;
  return BrokerState(params, dcs, vms);
}

std::vector<DcId> rr_sequence(std::size_t dcs, int calls) {
  auto st = fresh(BrokerPolicy::RoundRobin, dcs);
  std::vector<DcId> out;
  for (int i = 0; i < calls; ++i) out.push_back(select_round_robin(st, dcs));
  return out;
}

TEST(RoundRobinBroker, SingleDataCenterTakesEverything) {
  EXPECT_EQ(rr_sequence(1, 4), (std::vector<DcId>{0, 0, 0, 0}));
}

TEST(RoundRobinBroker, TwoDataCentersAlternate) {
  EXPECT_EQ(rr_sequence(2, 4), (std::vector<DcId>{0, 1, 0, 1}));
}

TEST(RoundRobinBroker, ThreeDataCentersCycle) {
  EXPECT_EQ(rr_sequence(3, 5), (std::vector<DcId>{0, 1, 2, 0, 1}));
}

TEST(RoundRobinBroker, CursorStaysInRangeAndWindowsAreFair) {
  for (std::size_t m = 1; m <= 7; ++m) {
    auto st = fresh(BrokerPolicy::RoundRobin, m);
    EXPECT_EQ(st.rr_cursor, -1);
    std::vector<DcId> seq;
    for (std::size_t i = 0; i < 6 * m; ++i) {
      seq.push_back(select_round_robin(st, m));
      EXPECT_GE(st.rr_cursor, -1);
      EXPECT_LT(st.rr_cursor, static_cast<std::int64_t>(m));
    }
    for (std::size_t s = 0; s + m <= seq.size(); ++s) {
      std::vector<DcId> w(seq.begin() + s, seq.begin() + s + m);
      std::sort(w.begin(), w.end());
      for (std::size_t i = 0; i < m; ++i) EXPECT_EQ(w[i], i);
    }
  }
}

// Routing under the round-robin broker ignores origin, latency and load.
TEST(RoundRobinBroker, SelectionIndependentOfOriginAndLoad) {
  Scenario a;
  a.user_count_divisor = 1000;
  a.vm_capacity = 1000;
  a.dc_placement = {RegionId{0}, RegionId{2}, RegionId{4}};
  a.broker.policy = BrokerPolicy::RoundRobin;
  Scenario b = a;
  b.internet.latency_ms[0] = {400, 1, 1, 1, 1, 1};
  b.vm_count = 3;

  struct Recorder : TraceSink {
    void on_event(const Event& e) override {
      if (e.kind == EventKind::RequestArriveAtDC) order.emplace(e.cloudlet, e.dc);
    }
    std::map<CloudletId, DcId> order;
  } ra, rb;
  run(a, &ra);
  run(b, &rb);
  ASSERT_EQ(ra.order.size(), rb.order.size());
  for (const auto& [id, dc] : ra.order) {
    EXPECT_EQ(dc, id % 3);
    EXPECT_EQ(rb.order.at(id), dc);
  }
}

const InternetCharacteristics net = InternetCharacteristics::defaults();

TEST(ProximityBroker, SelfRegionWins) {
  Rng rng(1);
  const std::vector<RegionId> dcs{RegionId{0}, RegionId{2}};
  EXPECT_EQ(select_proximity(RegionId{0}, dcs, net, rng), 0u);
  EXPECT_EQ(select_proximity(RegionId{2}, dcs, net, rng), 1u);
}

TEST(ProximityBroker, SingleDataCenterRegardlessOfLatency) {
  Rng rng(1);
  const std::vector<RegionId> dcs{RegionId{3}};
  for (std::size_t o = 0; o < kRegionCount; ++o) EXPECT_EQ(select_proximity(RegionId{o}, dcs, net, rng), 0u);
}

TEST(ProximityBroker, ArgminOverHostingRegions) {
  Rng rng(9);
  const std::vector<RegionId> dcs{RegionId{1}, RegionId{3}, RegionId{5}};
  for (std::size_t o = 0; o < kRegionCount; ++o) {
    const DcId pick = select_proximity(RegionId{o}, dcs, net, rng);
    for (const auto r : dcs) EXPECT_LE(net.latency(RegionId{o}, dcs[pick]), net.latency(RegionId{o}, r));
  }
}

// Two co-located data centers: draws should be uniform. Chi-square with one
// degree of freedom, 0.1% critical value 10.83.
TEST(ProximityBroker, CoLocatedTieIsUniform) {
  Rng rng(2024);
  const std::vector<RegionId> dcs{RegionId{0}, RegionId{0}, RegionId{3}};
  const int n = 20'000;
  int hits[3] = {0, 0, 0};
  for (int i = 0; i < n; ++i) ++hits[select_proximity(RegionId{0}, dcs, net, rng)];
  EXPECT_EQ(hits[2], 0);
  const double e = n / 2.0;
  const double chi2 = (hits[0] - e) * (hits[0] - e) / e + (hits[1] - e) * (hits[1] - e) / e;
  EXPECT_LT(chi2, 10.83);
  EXPECT_EQ(select_proximity(RegionId{0}, dcs, net, rng, TieBreak::LowestId), 0u);
}

TEST(PerfOptimizedBroker, PriorOnlyIsNearestByLatency) {
  auto st = fresh(BrokerPolicy::PerfOptimized, 3);
  const std::vector<RegionId> dcs{RegionId{1}, RegionId{2}, RegionId{5}};
  for (std::size_t o = 0; o < kRegionCount; ++o) {
    Rng rng(1);
    EXPECT_EQ(select_perf_optimized(st, RegionId{o}, dcs, net),
              select_proximity(RegionId{o}, dcs, net, rng, TieBreak::LowestId));
  }
}

TEST(PerfOptimizedBroker, LowestEstimateWins) {
  auto st = fresh(BrokerPolicy::PerfOptimized, 2);
  st.rt_estimate = {900.0, 400.0};
  const std::vector<RegionId> dcs{RegionId{0}, RegionId{2}};
  EXPECT_EQ(select_perf_optimized(st, RegionId{0}, dcs, net), 1u);
  st.rt_estimate = {400.0, 400.0};
  EXPECT_EQ(select_perf_optimized(st, RegionId{2}, dcs, net), 0u);
}

TEST(PerfOptimizedBroker, InvariantUnderConstantShift) {
  Rng rng(4);
  const std::vector<RegionId> dcs{RegionId{0}, RegionId{1}, RegionId{2}, RegionId{3}};
  for (int trial = 0; trial < 200; ++trial) {
    auto st = fresh(BrokerPolicy::PerfOptimized, 4);
    for (auto& e : st.rt_estimate) e = static_cast<double>(rng.below(50)) * 10.0;
    auto shifted = st;
    const double c = static_cast<double>(rng.below(10'000));
    for (auto& e : shifted.rt_estimate) *e += c;
    EXPECT_EQ(select_perf_optimized(st, RegionId{4}, dcs, net), select_perf_optimized(shifted, RegionId{4}, dcs, net));
  }
}

TEST(ResponseSample, FirstSampleInitializesThenSmooths) {
  auto st = fresh(BrokerPolicy::PerfOptimized, 2);
  record_response_sample(st, 1, 600, 100);
  EXPECT_EQ(st.rt_estimate[1], 600.0);
  record_response_sample(st, 1, 200, 100);
  EXPECT_EQ(st.rt_estimate[1], 400.0);
  EXPECT_FALSE(st.rt_estimate[0].has_value());
  EXPECT_THROW(record_response_sample(st, 0, -1, 0), HardFault);
}

TEST(ResponseSample, BestProcessingTimeNeverIncreases) {
  auto st = fresh(BrokerPolicy::DynamicConfig, 1);
  record_response_sample(st, 0, 900, 300);
  record_response_sample(st, 0, 900, 500);
  EXPECT_EQ(st.best_proc_time[0], 300);
  Rng rng(8);
  SimTime best = 300;
  for (int i = 0; i < 1000; ++i) {
    record_response_sample(st, 0, 1000, static_cast<SimTime>(rng.below(2000)));
    EXPECT_LE(*st.best_proc_time[0], best);
    best = *st.best_proc_time[0];
  }
}

TEST(DynamicConfigTick, RatioOneDoesNothing) {
  auto st = fresh(BrokerPolicy::DynamicConfig, 1);
  record_response_sample(st, 0, 500, 300);
  const std::vector<std::int64_t> counts{25};
  st.params.min_vms = 25;  // down-rule blocked at the floor
  EXPECT_TRUE(dynamic_config_tick(st, counts).empty());

  // Above the floor a ratio of 1.0 is below k_down and releases a VM.
  record_response_sample(st, 0, 500, 300);
  st.params.min_vms = 1;
  EXPECT_EQ(dynamic_config_tick(st, counts), (std::vector<ScalingAction>{{0, -1}}));
}

TEST(DynamicConfigTick, AddsVmWhenRatioExceedsThreshold) {
  auto st = fresh(BrokerPolicy::DynamicConfig, 1);
  st.best_proc_time[0] = 300;
  st.recent_proc_sum[0] = 600;
  st.recent_proc_count[0] = 1;
  const std::vector<std::int64_t> counts{25};
  EXPECT_EQ(dynamic_config_tick(st, counts), (std::vector<ScalingAction>{{0, +1}}));
  EXPECT_EQ(st.recent_proc_count[0], 0);  // interval cleared
}

TEST(DynamicConfigTick, RespectsMaximum) {
  auto st = fresh(BrokerPolicy::DynamicConfig, 1, 25);
  EXPECT_EQ(st.max_vms, 50);
  st.best_proc_time[0] = 300;
  st.recent_proc_sum[0] = 600;
  st.recent_proc_count[0] = 1;
  const std::vector<std::int64_t> counts{50};
  EXPECT_TRUE(dynamic_config_tick(st, counts).empty());
}

TEST(DynamicConfigTick, RemovesWhenCloseToBestAndAboveMinimum) {
  auto st = fresh(BrokerPolicy::DynamicConfig, 2);
  st.best_proc_time = {300, 300};
  st.recent_proc_sum = {310, 310};
  st.recent_proc_count = {1, 1};
  const std::vector<std::int64_t> counts{5, 1};
  EXPECT_EQ(dynamic_config_tick(st, counts), (std::vector<ScalingAction>{{0, -1}}));
}

TEST(DynamicConfigTick, NoSamplesNoAction) {
  auto st = fresh(BrokerPolicy::DynamicConfig, 2);
  st.best_proc_time = {300, 300};
  const std::vector<std::int64_t> counts{5, 5};
  EXPECT_TRUE(dynamic_config_tick(st, counts).empty());
}

// Full runs under dynamic configuration keep every DC's VM count within
// [min, max] at all times.
TEST(DynamicConfig, VmCountStaysWithinBoundsDuringRun) {
  struct Counter : TraceSink {
    std::map<DcId, std::int64_t> vms;
    std::int64_t lo = 1, hi = 0, adds = 0, removes = 0;
    bool ok = true;
    void on_vm_added(DcId dc, VmId, SimTime) override { ++adds; check(++vms[dc]); }
    void on_vm_retired(DcId dc, VmId, SimTime) override { ++removes; check(--vms[dc]); }
    void check(std::int64_t n) { ok = ok && n >= lo && n <= hi; }
  };
  for (auto lb : {LbPolicy::RoundRobin, LbPolicy::Throttled, LbPolicy::ActiveMonitoring}) {
    Scenario s;
    s.user_count_divisor = 1000;
    s.vm_count = 6;
    s.vm_capacity = 1000;
    s.broker.policy = BrokerPolicy::DynamicConfig;
    s.broker.min_vms = 2;
    s.broker.max_vms = 9;
    s.lb_policy = lb;
    Counter c;
    c.lo = 2;
    c.hi = 9;
    for (DcId d = 0; d < s.dc_placement.size(); ++d) c.vms[d] = s.vm_count;
    const auto r = run(s, &c);
    EXPECT_TRUE(c.ok);
    EXPECT_GT(c.adds + c.removes, 0);
    EXPECT_EQ(r.stats.requests_emitted, r.stats.requests_completed);
  }
}

}  // namespace
}  // namespace brokersim

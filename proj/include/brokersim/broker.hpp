#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rng.hpp"
#include "topology.hpp"
#include "types.hpp"

namespace brokersim {

enum class BrokerPolicy { RoundRobin, Proximity, PerfOptimized, DynamicConfig };

inline std::string_view to_string(BrokerPolicy p) {
  switch (p) {
    case BrokerPolicy::RoundRobin: return "round_robin";
    case BrokerPolicy::Proximity: return "proximity";
    case BrokerPolicy::PerfOptimized: return "perf_optimized";
    case BrokerPolicy::DynamicConfig: return "dynamic_config";
  }
  return "?";
}

enum class TieBreak { Random, LowestId };

struct BrokerParams {
  BrokerPolicy policy = BrokerPolicy::RoundRobin;
  TieBreak tie_break = TieBreak::Random;
  // Performance-optimized routing.
  double smoothing_alpha = 0.5;
  double prior_latency_factor = 2.0;
  // Dynamic configuration.
  double k_up = 1.5;
  double k_down = 1.1;
  SimTime monitor_interval_ms = 60'000;
  std::int64_t min_vms = 1;
  std::optional<std::int64_t> max_vms;  // default: twice the initial count
};

/// Mutable routing state for one simulation run.
struct BrokerState {
  BrokerParams params;
  std::int64_t rr_cursor = -1;
  std::vector<std::optional<double>> rt_estimate;
  std::vector<std::optional<SimTime>> best_proc_time;
  std::vector<std::int64_t> recent_proc_sum;
  std::vector<std::int64_t> recent_proc_count;
  std::int64_t max_vms = 0;

  BrokerState(BrokerParams p, std::size_t dc_count, std::int64_t initial_vms)
      : params(p),
        rt_estimate(dc_count),
        best_proc_time(dc_count),
        recent_proc_sum(dc_count, 0),
        recent_proc_count(dc_count, 0),
        max_vms(p.max_vms.value_or(2 * initial_vms)) {}
};

/// The round-robin data-center selection: advance the cursor, wrap to zero
/// past the end, return it.
inline DcId select_round_robin(BrokerState& state, std::size_t dc_count) {
  if (dc_count == 0) throw HardFault("select_round_robin: no data centers");
  state.rr_cursor = state.rr_cursor + 1;
  if (state.rr_cursor >= static_cast<std::int64_t>(dc_count)) state.rr_cursor = 0;
  return static_cast<DcId>(state.rr_cursor);
}

/// A data center in the region closest to `origin`. Ties are broken from the
/// seeded stream or by lowest id.
inline DcId select_proximity(RegionId origin, std::span<const RegionId> dc_regions,
                             const InternetCharacteristics& net, Rng& rng,
                             TieBreak tie_break = TieBreak::Random) {
  if (dc_regions.empty()) throw HardFault("select_proximity: no data centers");
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  std::vector<DcId> tied;
  for (DcId dc = 0; dc < dc_regions.size(); ++dc) {
    const std::int64_t lat = net.latency(origin, dc_regions[dc]);
    if (lat < best) {
      best = lat;
      tied.assign(1, dc);
    } else if (lat == best) {
      tied.push_back(dc);
    }
  }
  if (tied.size() == 1 || tie_break == TieBreak::LowestId) return tied.front();
  return tied[rng.below(tied.size())];
}

/// Score each DC by its smoothed response time, or by a latency prior until
/// the first sample arrives, and take the minimum (lowest id on ties).
inline DcId select_perf_optimized(const BrokerState& state, RegionId origin,
                                  std::span<const RegionId> dc_regions,
                                  const InternetCharacteristics& net) {
  if (dc_regions.empty()) throw HardFault("select_perf_optimized: no data centers");
  DcId best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (DcId dc = 0; dc < dc_regions.size(); ++dc) {
    const double score = state.rt_estimate[dc].value_or(
        state.params.prior_latency_factor * static_cast<double>(net.latency(origin, dc_regions[dc])));
    if (score < best_score) {
      best_score = score;
      best = dc;
    }
  }
  return best;
}

/// Feeds one completed cloudlet back to the broker.
inline void record_response_sample(BrokerState& state, DcId dc, SimTime observed_rt,
                                   SimTime observed_processing) {
  if (observed_rt < 0 || observed_processing < 0) throw HardFault("negative response sample");
  auto& est = state.rt_estimate.at(dc);
  const double a = state.params.smoothing_alpha;
  est = est ? a * static_cast<double>(observed_rt) + (1.0 - a) * *est : static_cast<double>(observed_rt);

  if (state.params.policy == BrokerPolicy::DynamicConfig) {
    auto& best = state.best_proc_time[dc];
    if (!best || observed_processing < *best) best = observed_processing;
    state.recent_proc_sum[dc] += observed_processing;
    ++state.recent_proc_count[dc];
  }
}

struct ScalingAction {
  DcId dc = 0;
  int delta = 0;  // +1 add a VM, -1 remove one

  friend bool operator==(const ScalingAction&, const ScalingAction&) = default;
};

/// Compares each DC's mean processing time over the last interval with the
/// best it has ever achieved and scales by one VM. Clears the interval.
inline std::vector<ScalingAction> dynamic_config_tick(BrokerState& state,
                                                      std::span<const std::int64_t> vm_counts) {
  std::vector<ScalingAction> actions;
  const auto& p = state.params;
  for (DcId dc = 0; dc < vm_counts.size(); ++dc) {
    const std::int64_t n = state.recent_proc_count[dc];
    if (n == 0 || !state.best_proc_time[dc]) continue;
    // mean > k * best  <=>  sum > k * best * n
    const double sum = static_cast<double>(state.recent_proc_sum[dc]);
    const double base = static_cast<double>(*state.best_proc_time[dc]) * static_cast<double>(n);
    if (sum > p.k_up * base && vm_counts[dc] < state.max_vms) {
      actions.push_back({dc, +1});
    } else if (sum < p.k_down * base && vm_counts[dc] > p.min_vms) {
      actions.push_back({dc, -1});
    }
    state.recent_proc_sum[dc] = 0;
    state.recent_proc_count[dc] = 0;
  }
  return actions;
}

}  // namespace brokersim

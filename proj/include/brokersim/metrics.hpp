#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "types.hpp"
#include "workload.hpp"

namespace brokersim {

/// Weighted count/sum/min/max over integer milliseconds. Sums are exact.
struct Aggregate {
  std::int64_t count = 0;  // total weight
  std::int64_t sum = 0;    // sum of value * weight
  std::optional<SimTime> min;
  std::optional<SimTime> max;

  void add(SimTime value, std::int64_t weight) {
    count += weight;
    sum += value * weight;
    min = min ? std::min(*min, value) : value;
    max = max ? std::max(*max, value) : value;
  }

  void merge(const Aggregate& other) {
    count += other.count;
    sum += other.sum;
    if (other.min) min = min ? std::min(*min, *other.min) : *other.min;
    if (other.max) max = max ? std::max(*max, *other.max) : *other.max;
  }

  /// Mean rounded to the nearest millisecond (halves away from zero);
  /// absent when empty.
  [[nodiscard]] std::optional<std::int64_t> average() const {
    if (count == 0) return std::nullopt;
    const __int128 twice = 2 * static_cast<__int128>(sum);
    return static_cast<std::int64_t>((twice + count) / (2 * static_cast<__int128>(count)));
  }

  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

struct MetricsStore {
  std::map<std::string, Aggregate> per_ub;  // response time, request-weighted
  std::map<DcId, Aggregate> per_dc;         // processing time, request-weighted
  Aggregate overall;

  /// Adds one completed cloudlet.
  void record(const Cloudlet& c, const std::string& ub_id) {
    if (!c.complete()) throw HardFault("record: cloudlet " + std::to_string(c.id) + " is incomplete");
    const SimTime rt = c.response_time();
    per_ub[ub_id].add(rt, c.group_size);
    overall.add(rt, c.group_size);
    per_dc[*c.assigned_dc].add(c.processing_time(), c.group_size);
  }

  void merge(const MetricsStore& other) {
    for (const auto& [k, v] : other.per_ub) per_ub[k].merge(v);
    for (const auto& [k, v] : other.per_dc) per_dc[k].merge(v);
    overall.merge(other.overall);
  }

  friend bool operator==(const MetricsStore&, const MetricsStore&) = default;
};

struct SummaryRow {
  std::string label;  // user-base id, "ALL", or "DC<n>"
  std::int64_t requests = 0;
  std::optional<std::int64_t> avg_ms;
  std::optional<SimTime> min_ms;
  std::optional<SimTime> max_ms;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

struct Summary {
  SummaryRow overall;
  std::vector<SummaryRow> user_bases;    // response times
  std::vector<SummaryRow> data_centers;  // processing times

  friend bool operator==(const Summary&, const Summary&) = default;
};

inline SummaryRow make_row(std::string label, const Aggregate& a) {
  return {std::move(label), a.count, a.average(), a.min, a.max};
}

/// Report rows for a finished run. User bases appear in `ub_order`; ids with
/// no traffic get an empty row.
inline Summary summarize(const MetricsStore& store, const std::vector<std::string>& ub_order) {
  Summary s;
  s.overall = make_row("ALL", store.overall);
  for (const auto& id : ub_order) {
    auto it = store.per_ub.find(id);
    s.user_bases.push_back(make_row(id, it == store.per_ub.end() ? Aggregate{} : it->second));
  }
  for (const auto& [dc, agg] : store.per_dc) s.data_centers.push_back(make_row("DC" + std::to_string(dc), agg));
  return s;
}

}  // namespace brokersim

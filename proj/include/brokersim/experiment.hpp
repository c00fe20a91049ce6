#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "rng.hpp"
#include "scenario.hpp"
#include "simulation.hpp"

namespace brokersim {

struct CellDescriptor {
  std::vector<RegionId> distribution;
  BrokerPolicy broker = BrokerPolicy::RoundRobin;
  LbPolicy lb = LbPolicy::RoundRobin;

  /// e.g. "R0+R2"
  [[nodiscard]] std::string distribution_label() const {
    std::string out;
    for (std::size_t i = 0; i < distribution.size(); ++i) out += (i ? "+" : "") + region_name(distribution[i]);
    return out;
  }

  /// Stable identity of the cell, also the input of its seed.
  [[nodiscard]] std::string key() const {
    return distribution_label() + "/" + std::string(to_string(broker)) + "/" + std::string(to_string(lb));
  }
};

struct CellResult {
  CellDescriptor cell;
  Summary summary;
  RunStats stats;
  MetricsStore metrics;  // exact sums, for comparisons finer than the rounded summary
};

/// The cell's scenario: the base with placement and policies substituted and
/// a seed hashed from the base seed and the cell key.
inline Scenario cell_scenario(const Scenario& base, const CellDescriptor& cell) {
  Scenario s = base;
  s.dc_placement = cell.distribution;
  s.broker.policy = cell.broker;
  s.lb_policy = cell.lb;
  s.seed = derive_seed(base.seed, cell.key());
  return s;
}

/// Cells in canonical order: distribution, then broker, then LB policy.
inline std::vector<CellDescriptor> enumerate_cells(const SweepGrid& grid) {
  std::vector<CellDescriptor> cells;
  for (const auto& d : grid.dc_distributions)
    for (auto b : grid.broker_policies)
      for (auto l : grid.lb_policies) cells.push_back({d, b, l});
  return cells;
}

/// Failure of one sweep cell; the message starts with the cell key.
class CellFault : public HardFault {
 public:
  using HardFault::HardFault;
};

/// Parallelism from BROKERSIM_PARALLELISM, else the hardware thread count.
inline unsigned default_parallelism() {
  if (const char* env = std::getenv("BROKERSIM_PARALLELISM")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs every cell of the grid. Results come back in canonical order and do
/// not depend on `parallelism`.
inline std::vector<CellResult> run_sweep(const SweepGrid& grid, unsigned parallelism = 1) {
  const auto cells = enumerate_cells(grid);
  std::vector<std::optional<CellResult>> out(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        Scenario s = cell_scenario(grid.base, cells[i]);
        RunResult r = run(s);
        out[i] = CellResult{cells[i], r.summary(), r.stats, std::move(r.metrics)};
      } catch (const std::exception& e) {
        errors[i] = std::make_exception_ptr(CellFault(cells[i].key() + ": " + e.what()));
      }
    }
  };

  const unsigned threads = std::clamp<unsigned>(parallelism, 1, static_cast<unsigned>(std::max<std::size_t>(cells.size(), 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<CellResult> results;
  results.reserve(cells.size());
  for (auto& r : out) results.push_back(std::move(*r));
  return results;
}

inline constexpr const char* kReportHeader =
    "scenario,dc_distribution,broker_policy,lb_policy,overall_avg_rt_ms,overall_min_rt_ms,"
    "overall_max_rt_ms,requests,ub_id,ub_avg_rt_ms";

namespace detail {
inline std::string opt(const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : std::string{}; }
}  // namespace detail

/// CSV block for one cell: a row per user base, then the ALL row. The
/// overall columns repeat on every row; `requests` is the row's own count.
inline std::string report_block(const std::string& scenario_name, const CellResult& r) {
  std::string out;
  const auto& o = r.summary.overall;
  const std::string prefix = scenario_name + "," + r.cell.distribution_label() + "," +
                             std::string(to_string(r.cell.broker)) + "," + std::string(to_string(r.cell.lb)) + "," +
                             detail::opt(o.avg_ms) + "," + detail::opt(o.min_ms) + "," + detail::opt(o.max_ms) + ",";
  for (const auto& ub : r.summary.user_bases)
    out += prefix + std::to_string(ub.requests) + "," + ub.label + "," + detail::opt(ub.avg_ms) + "\n";
  out += prefix + std::to_string(o.requests) + ",ALL," + detail::opt(o.avg_ms) + "\n";
  return out;
}

/// Writes the header and every cell block. Throws on stream failure.
inline void emit_report(const std::string& scenario_name, const std::vector<CellResult>& rows, std::ostream& dest) {
  if (rows.empty()) throw HardFault("emit_report: no rows");
  dest << kReportHeader << '\n';
  for (const auto& r : rows) dest << report_block(scenario_name, r);
  dest.flush();
  if (!dest) throw std::runtime_error("emit_report: write failed");
}

}  // namespace brokersim

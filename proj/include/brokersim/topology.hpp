#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <string>

#include "types.hpp"

namespace brokersim {

template <typename T>
using RegionMatrix = std::array<std::array<T, kRegionCount>, kRegionCount>;

/// One-way latency (ms) and throughput (bytes/ms) between every pair of
/// regions, diagonal included.
struct InternetCharacteristics {
  RegionMatrix<std::int64_t> latency_ms{};
  RegionMatrix<std::int64_t> bandwidth_bytes_per_ms{};

  /// Symmetric distance-tiered defaults. These are plumbing values, not
  /// measurements: 25 ms inside a region, 100-500 ms across regions,
  /// 2 Gbit/s inside a region and 1 Gbit/s across.
  static InternetCharacteristics defaults() {
    InternetCharacteristics ic;
    ic.latency_ms = {{
        {25, 100, 150, 250, 250, 100},
        {100, 25, 250, 500, 350, 200},
        {150, 250, 25, 150, 150, 200},
        {250, 500, 150, 25, 500, 500},
        {250, 350, 150, 500, 25, 500},
        {100, 200, 200, 500, 500, 25},
    }};
    for (std::size_t i = 0; i < kRegionCount; ++i)
      for (std::size_t j = 0; j < kRegionCount; ++j)
        ic.bandwidth_bytes_per_ms[i][j] = (i == j) ? 250'000 : 125'000;
    return ic;
  }

  /// Throws ConfigError naming the first bad entry.
  void validate() const {
    for (std::size_t i = 0; i < kRegionCount; ++i) {
      for (std::size_t j = 0; j < kRegionCount; ++j) {
        const auto at = "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
        if (latency_ms[i][j] < 0) throw ConfigError("internet.latency_ms" + at + " must be >= 0");
        if (bandwidth_bytes_per_ms[i][j] <= 0)
          throw ConfigError("internet.bandwidth_bytes_per_ms" + at + " must be > 0");
      }
    }
  }

  /// Latency plus serialization time, rounded up to a whole millisecond.
  [[nodiscard]] SimTime transfer_delay(RegionId src, RegionId dst, std::int64_t size_bytes) const {
    const std::int64_t bw = bandwidth_bytes_per_ms[src.index][dst.index];
    const std::int64_t transmit = (size_bytes + bw - 1) / bw;
    return latency_ms[src.index][dst.index] + transmit;
  }

  [[nodiscard]] std::int64_t latency(RegionId src, RegionId dst) const {
    return latency_ms[src.index][dst.index];
  }

  /// All regions by ascending latency from src; ties by region index.
  [[nodiscard]] std::array<RegionId, kRegionCount> proximity_order(RegionId src) const {
    std::array<std::size_t, kRegionCount> idx{};
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const auto& row = latency_ms[src.index];
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return row[a] < row[b]; });
    std::array<RegionId, kRegionCount> out{};
    std::transform(idx.begin(), idx.end(), out.begin(), [](std::size_t i) { return RegionId{i}; });
    return out;
  }
};

}  // namespace brokersim

#include <algorithm>
#include <array>

#include <gtest/gtest.h>

#include "brokersim/rng.hpp"
#include "brokersim/topology.hpp"

namespace brokersim {
namespace {

InternetCharacteristics uniform(std::int64_t latency, std::int64_t bandwidth) {
  InternetCharacteristics ic;
  for (auto& row : ic.latency_ms) row.fill(latency);
  for (auto& row : ic.bandwidth_bytes_per_ms) row.fill(bandwidth);
  return ic;
}

TEST(TransferDelay, DegenerateIsZero) {
  EXPECT_EQ(uniform(0, 1000).transfer_delay(RegionId{1}, RegionId{4}, 0), 0);
}

TEST(TransferDelay, LatencyPlusSerialization) {
  auto ic = uniform(10, 1000);
  ic.latency_ms[0][2] = 150;
  EXPECT_EQ(ic.transfer_delay(RegionId{0}, RegionId{2}, 100), 151);
}

TEST(TransferDelay, RoundsSerializationUp) {
  EXPECT_EQ(uniform(10, 1000).transfer_delay(RegionId{0}, RegionId{0}, 1), 11);
  EXPECT_EQ(uniform(10, 1000).transfer_delay(RegionId{0}, RegionId{0}, 1000), 11);
  EXPECT_EQ(uniform(10, 1000).transfer_delay(RegionId{0}, RegionId{0}, 1001), 12);
}

TEST(TransferDelay, MonotoneInSize) {
  const auto ic = InternetCharacteristics::defaults();
  for (std::size_t a = 0; a < kRegionCount; ++a)
    for (std::size_t b = 0; b < kRegionCount; ++b) {
      SimTime prev = 0;
      for (std::int64_t size = 0; size < 2'000'000; size += 9973) {
        const SimTime d = ic.transfer_delay(RegionId{a}, RegionId{b}, size);
        EXPECT_GE(d, prev);
        prev = d;
      }
    }
}

std::array<std::size_t, kRegionCount> indices(const std::array<RegionId, kRegionCount>& order) {
  std::array<std::size_t, kRegionCount> out{};
  std::transform(order.begin(), order.end(), out.begin(), [](RegionId r) { return r.index; });
  return out;
}

TEST(ProximityOrder, UniformLatencyKeepsIndexOrder) {
  const auto ic = uniform(50, 1000);
  for (std::size_t src = 0; src < kRegionCount; ++src)
    EXPECT_EQ(indices(ic.proximity_order(RegionId{src})), (std::array<std::size_t, 6>{0, 1, 2, 3, 4, 5}));
}

TEST(ProximityOrder, SortsRowWithIndexTieBreak) {
  auto ic = uniform(50, 1000);
  ic.latency_ms[3] = {5, 1, 9, 1, 7, 3};
  EXPECT_EQ(indices(ic.proximity_order(RegionId{3})), (std::array<std::size_t, 6>{1, 3, 5, 0, 4, 2}));
}

TEST(ProximityOrder, OwnRegionFirstWhenStrictlyClosest) {
  const auto ic = InternetCharacteristics::defaults();
  for (std::size_t src = 0; src < kRegionCount; ++src)
    EXPECT_EQ(ic.proximity_order(RegionId{src}).front().index, src);
}

TEST(ProximityOrder, PermutationInvariantUnderRescaling) {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    InternetCharacteristics ic = uniform(0, 1);
    for (auto& row : ic.latency_ms)
      for (auto& v : row) v = static_cast<std::int64_t>(rng.below(8));  // plenty of ties
    const auto scale = static_cast<std::int64_t>(1 + rng.below(50));
    InternetCharacteristics scaled = ic;
    for (auto& row : scaled.latency_ms)
      for (auto& v : row) v *= scale;
    for (std::size_t src = 0; src < kRegionCount; ++src) {
      auto order = indices(ic.proximity_order(RegionId{src}));
      EXPECT_EQ(order, indices(scaled.proximity_order(RegionId{src})));
      auto sorted = order;
      std::sort(sorted.begin(), sorted.end());
      EXPECT_EQ(sorted, (std::array<std::size_t, 6>{0, 1, 2, 3, 4, 5}));
      for (std::size_t i = 1; i < kRegionCount; ++i) {
        const auto a = ic.latency_ms[src][order[i - 1]], b = ic.latency_ms[src][order[i]];
        EXPECT_TRUE(a < b || (a == b && order[i - 1] < order[i]));
      }
    }
  }
}

TEST(InternetCharacteristics, ValidateNamesBadEntry) {
  auto ic = InternetCharacteristics::defaults();
  EXPECT_NO_THROW(ic.validate());
  ic.bandwidth_bytes_per_ms[2][4] = 0;
  try {
    ic.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bandwidth_bytes_per_ms[2][4]"), std::string::npos);
  }
  ic = InternetCharacteristics::defaults();
  ic.latency_ms[1][1] = -1;
  EXPECT_THROW(ic.validate(), ConfigError);
}

TEST(InternetCharacteristics, DefaultsAreSymmetricWithSmallNonzeroDiagonal) {
  const auto ic = InternetCharacteristics::defaults();
  for (std::size_t a = 0; a < kRegionCount; ++a) {
    EXPECT_GT(ic.latency_ms[a][a], 0);
    for (std::size_t b = 0; b < kRegionCount; ++b) {
      EXPECT_EQ(ic.latency_ms[a][b], ic.latency_ms[b][a]);
      if (a != b) {
        EXPECT_LT(ic.latency_ms[a][a], ic.latency_ms[a][b]);
      }
    }
  }
}

}  // namespace
}  // namespace brokersim

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace brokersim {

/// Simulation time and durations, in integer milliseconds.
using SimTime = std::int64_t;

inline constexpr SimTime kMsPerSecond = 1000;
inline constexpr SimTime kMsPerHour = 3'600'000;
inline constexpr SimTime kMsPerDay = 24 * kMsPerHour;

inline constexpr std::size_t kRegionCount = 6;

/// One of the six world regions, R0..R5.
struct RegionId {
  std::size_t index = 0;

  friend constexpr bool operator==(RegionId, RegionId) = default;
  friend constexpr auto operator<=>(RegionId, RegionId) = default;
};

using DcId = std::size_t;
using VmId = std::size_t;
using UbIndex = std::size_t;
using CloudletId = std::uint64_t;

/// Raised on conditions that can only come from a logic bug (scheduling in
/// the past, recording an unfinished cloudlet, ...). Never recovered from.
class HardFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised when a scenario document fails to parse or validate. The message
/// names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string region_name(RegionId r) { return "R" + std::to_string(r.index); }

}  // namespace brokersim

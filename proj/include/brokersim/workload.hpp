#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rng.hpp"
#include "types.hpp"

namespace brokersim {

enum class ArrivalMode { Deterministic, Poisson };

/// A population of users in one region with a daily peak window.
struct UserBase {
  std::string id;
  RegionId region;
  double peak_start_hour = 0.0;  // GMT, window is [start, end)
  double peak_end_hour = 0.0;
  std::int64_t users_peak = 0;
  std::int64_t users_offpeak = 0;
  std::int64_t requests_per_user_per_hour = 12;
  std::int64_t request_size_bytes = 100;
  std::int64_t instruction_length = 500;  // instruction units per request

  void validate(const std::string& field) const {
    if (region.index >= kRegionCount)
      throw ConfigError(field + ".region must be in [0, 5], got " + std::to_string(region.index));
    if (users_offpeak < 0) throw ConfigError(field + ".users_offpeak must be >= 0");
    if (users_peak < users_offpeak)
      throw ConfigError(field + ".users_peak must be >= users_offpeak");
    if (!(peak_start_hour >= 0.0 && peak_start_hour < peak_end_hour && peak_end_hour <= 24.0))
      throw ConfigError(field + ".peak window must satisfy 0 <= start < end <= 24");
    if (requests_per_user_per_hour < 0)
      throw ConfigError(field + ".requests_per_user_per_hour must be >= 0");
    if (request_size_bytes < 0) throw ConfigError(field + ".request_size_bytes must be >= 0");
    if (instruction_length <= 0) throw ConfigError(field + ".instruction_length must be > 0");
  }
};

/// The six user bases of the reference social-network workload.
inline std::vector<UserBase> default_user_bases() {
  return {
      {"UB1", RegionId{0}, 13.0, 15.0, 11'048'660, 1'104'866},
      {"UB2", RegionId{1}, 15.0, 17.0, 5'626'555, 562'655},
      {"UB3", RegionId{2}, 20.0, 22.0, 11'641'787, 1'164'178},
      {"UB4", RegionId{3}, 1.0, 3.0, 10'764'114, 1'076'411},
      {"UB5", RegionId{4}, 21.0, 23.0, 2'010'279, 201'027},
      {"UB6", RegionId{5}, 9.0, 11.0, 679'869, 67'986},
  };
}

/// A batch of user requests travelling through the system as one unit.
struct Cloudlet {
  CloudletId id = 0;
  UbIndex origin = 0;
  std::int64_t group_size = 0;
  std::int64_t total_instructions = 0;
  std::int64_t payload_size = 0;
  SimTime emitted_at = 0;
  std::optional<SimTime> arrived_dc_at;
  std::optional<SimTime> service_start_at;
  std::optional<SimTime> service_end_at;
  std::optional<SimTime> response_at;
  std::optional<DcId> assigned_dc;
  std::optional<VmId> assigned_vm;  // VM of the first slice to start

  [[nodiscard]] bool complete() const {
    return arrived_dc_at && service_start_at && service_end_at && response_at && assigned_dc;
  }
  [[nodiscard]] SimTime response_time() const { return *response_at - emitted_at; }
  [[nodiscard]] SimTime processing_time() const { return *service_end_at - *arrived_dc_at; }
};

inline SimTime hour_to_ms(double hour) { return std::llround(hour * static_cast<double>(kMsPerHour)); }

namespace detail {

inline bool in_window(SimTime ms_of_day, SimTime start, SimTime end) {
  return ms_of_day >= start && ms_of_day < end;
}

inline std::int64_t active_users_at_ms(const UserBase& ub, SimTime ms_of_day) {
  return in_window(ms_of_day, hour_to_ms(ub.peak_start_hour), hour_to_ms(ub.peak_end_hour))
             ? ub.users_peak
             : ub.users_offpeak;
}

}  // namespace detail

/// Users online at the given GMT hour: a step function over the peak window.
inline std::int64_t active_users(const UserBase& ub, double clock_gmt_hour) {
  return detail::active_users_at_ms(ub, hour_to_ms(clock_gmt_hour) % kMsPerDay);
}

struct Emission {
  SimTime at = 0;
  std::int64_t group_size = 0;

  friend bool operator==(const Emission&, const Emission&) = default;
};

/// Interval [begin, end) of simulated time over which a user base's active
/// user count is constant.
struct RateSegment {
  SimTime begin = 0;
  SimTime end = 0;
  std::int64_t users = 0;
};

inline std::vector<RateSegment> rate_segments(const UserBase& ub, double sim_start_gmt_hour,
                                              SimTime duration) {
  const SimTime start_ms = ((hour_to_ms(sim_start_gmt_hour) % kMsPerDay) + kMsPerDay) % kMsPerDay;
  std::vector<SimTime> cuts{0, duration};
  for (SimTime edge : {hour_to_ms(ub.peak_start_hour), hour_to_ms(ub.peak_end_hour)}) {
    SimTime t = ((edge - start_ms) % kMsPerDay + kMsPerDay) % kMsPerDay;
    for (; t < duration; t += kMsPerDay)
      if (t > 0) cuts.push_back(t);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<RateSegment> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const SimTime at = (start_ms + cuts[i]) % kMsPerDay;
    out.push_back({cuts[i], cuts[i + 1], detail::active_users_at_ms(ub, at)});
  }
  return out;
}

struct GenerationParams {
  double sim_start_gmt_hour = 13.0;
  SimTime duration = kMsPerHour;
  std::int64_t user_grouping_factor = 10'000;
  ArrivalMode mode = ArrivalMode::Deterministic;
};

/// Cloudlet emission times and sizes for one user base over [0, duration).
///
/// Deterministic mode spaces full groups evenly within each rate segment and
/// closes the segment with one partial group; each group is emitted at the
/// start of the interval whose requests it carries. Poisson mode emits full
/// groups with exponential gaps of the same mean.
inline std::vector<Emission> generate(const UserBase& ub, const GenerationParams& params, Rng& rng) {
  if (params.duration <= 0) throw HardFault("generate: duration must be > 0");
  const std::int64_t group = params.user_grouping_factor;
  std::vector<Emission> out;
  for (const RateSegment& seg : rate_segments(ub, params.sim_start_gmt_hour, params.duration)) {
    const __int128 per_hour = static_cast<__int128>(seg.users) * ub.requests_per_user_per_hour;
    if (per_hour == 0) continue;
    const SimTime length = seg.end - seg.begin;

    if (params.mode == ArrivalMode::Deterministic) {
      const auto total = static_cast<std::int64_t>(per_hour * length / kMsPerHour);
      const std::int64_t groups = (total + group - 1) / group;
      for (std::int64_t k = 0; k < groups; ++k) {
        const auto offset =
            static_cast<SimTime>(static_cast<__int128>(k) * group * kMsPerHour / per_hour);
        out.push_back({seg.begin + offset, std::min(group, total - k * group)});
      }
    } else {
      const double mean_gap =
          static_cast<double>(group) * static_cast<double>(kMsPerHour) / static_cast<double>(per_hour);
      double t = static_cast<double>(seg.begin);
      for (;;) {
        t += rng.exponential(mean_gap);
        if (!(t < static_cast<double>(seg.end))) break;
        out.push_back({static_cast<SimTime>(t), group});
      }
    }
  }
  return out;
}

}  // namespace brokersim

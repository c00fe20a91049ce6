#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "broker.hpp"
#include "datacenter.hpp"
#include "topology.hpp"
#include "types.hpp"
#include "workload.hpp"

namespace brokersim {

/// Complete configuration of one simulation run.
struct Scenario {
  std::string name = "default";
  std::uint64_t seed = 1;
  SimTime duration_ms = kMsPerHour;
  double sim_start_gmt_hour = 13.0;
  std::int64_t user_count_divisor = 1;
  std::vector<UserBase> user_bases = default_user_bases();
  std::vector<RegionId> dc_placement{RegionId{0}, RegionId{2}};
  std::int64_t hosts_per_dc = 40;
  std::int64_t processors_per_host = 4;
  std::int64_t vm_count = 25;
  std::int64_t vm_capacity = 1'000'000;
  InternetCharacteristics internet = InternetCharacteristics::defaults();
  BrokerParams broker;
  LbPolicy lb_policy = LbPolicy::RoundRobin;
  ArrivalMode arrival_mode = ArrivalMode::Deterministic;
  std::int64_t user_grouping_factor = 10'000;
  std::int64_t request_grouping_factor = 1'000;

  /// User bases with the population divisor applied.
  [[nodiscard]] std::vector<UserBase> effective_user_bases() const {
    auto out = user_bases;
    for (auto& ub : out) {
      ub.users_peak /= user_count_divisor;
      ub.users_offpeak /= user_count_divisor;
    }
    return out;
  }

  void validate() const {
    if (duration_ms <= 0) throw ConfigError("duration_ms must be > 0");
    if (!(sim_start_gmt_hour >= 0.0 && sim_start_gmt_hour < 24.0))
      throw ConfigError("sim_start_gmt_hour must be in [0, 24)");
    if (user_count_divisor < 1) throw ConfigError("user_count_divisor must be >= 1");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < user_bases.size(); ++i) {
      const auto field = "user_bases[" + std::to_string(i) + "]";
      user_bases[i].validate(field);
      if (!ids.insert(user_bases[i].id).second) throw ConfigError(field + ".id is duplicated");
      if (user_bases[i].id == "ALL") throw ConfigError(field + ".id 'ALL' is reserved");
    }
    if (dc_placement.empty()) throw ConfigError("dc_placement must be non-empty");
    for (std::size_t i = 0; i < dc_placement.size(); ++i)
      if (dc_placement[i].index >= kRegionCount)
        throw ConfigError("dc_placement[" + std::to_string(i) + "] must be a region in [0, 5], got " +
                          std::to_string(dc_placement[i].index));
    if (hosts_per_dc <= 0) throw ConfigError("hosts_per_dc must be > 0");
    if (processors_per_host <= 0) throw ConfigError("processors_per_host must be > 0");
    if (vm_count <= 0) throw ConfigError("vm_count must be > 0");
    if (vm_count > hosts_per_dc * processors_per_host)
      throw ConfigError("vm_count must be <= hosts_per_dc * processors_per_host");
    if (vm_capacity <= 0) throw ConfigError("vm_capacity must be > 0");
    internet.validate();
    if (user_grouping_factor <= 0) throw ConfigError("user_grouping_factor must be > 0");
    if (request_grouping_factor <= 0) throw ConfigError("request_grouping_factor must be > 0");
    const auto& b = broker;
    if (!(b.smoothing_alpha > 0.0 && b.smoothing_alpha <= 1.0))
      throw ConfigError("broker.smoothing_alpha must be in (0, 1]");
    if (!(b.prior_latency_factor >= 0.0)) throw ConfigError("broker.prior_latency_factor must be >= 0");
    if (!(b.k_down > 0.0 && b.k_down < b.k_up)) throw ConfigError("broker.k_down must be in (0, k_up)");
    if (b.monitor_interval_ms <= 0) throw ConfigError("broker.monitor_interval_ms must be > 0");
    if (b.min_vms < 1 || b.min_vms > vm_count) throw ConfigError("broker.min_vms must be in [1, vm_count]");
    const std::int64_t max_vms = b.max_vms.value_or(2 * vm_count);
    if (max_vms < vm_count) throw ConfigError("broker.max_vms must be >= vm_count");
    if (max_vms > hosts_per_dc * processors_per_host)
      throw ConfigError("broker.max_vms must be <= hosts_per_dc * processors_per_host");
  }
};

/// Axes of a policy/placement sweep over a base scenario.
struct SweepGrid {
  std::vector<std::vector<RegionId>> dc_distributions = default_distributions();
  std::vector<BrokerPolicy> broker_policies{BrokerPolicy::RoundRobin, BrokerPolicy::Proximity,
                                            BrokerPolicy::PerfOptimized, BrokerPolicy::DynamicConfig};
  std::vector<LbPolicy> lb_policies{LbPolicy::RoundRobin, LbPolicy::ActiveMonitoring, LbPolicy::Throttled};
  Scenario base;

  static std::vector<std::vector<RegionId>> default_distributions() {
    auto r = [](std::initializer_list<std::size_t> ids) {
      std::vector<RegionId> v;
      for (auto i : ids) v.push_back(RegionId{i});
      return v;
    };
    return {r({0, 2}), r({1, 2}), r({1, 3}), r({0, 1, 2}), r({0, 2, 4}), r({1, 3, 5})};
  }

  [[nodiscard]] std::size_t cell_count() const {
    return dc_distributions.size() * broker_policies.size() * lb_policies.size();
  }
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::string& path,
                           std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError((path.empty() ? "" : path + ".") + key + " is not a known field");
  }
}

template <typename T>
void read(const json& obj, std::string_view key, const std::string& path, T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  const std::string field = (path.empty() ? "" : path + ".") + std::string(key);
  try {
    if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw ConfigError(field + " must be an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (it->is_number_unsigned() || it->template get<std::int64_t>() >= 0) {
          out = it->template get<T>();
          return;
        }
        throw ConfigError(field + " must be non-negative");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw ConfigError(field + " must be a number");
    }
    out = it->template get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(field + ": " + e.what());
  }
}

inline RegionId parse_region(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ConfigError(field + " must be an integer region index");
  const auto i = v.get<std::int64_t>();
  if (i < 0 || i >= static_cast<std::int64_t>(kRegionCount))
    throw ConfigError(field + " must be a region in [0, 5], got " + std::to_string(i));
  return RegionId{static_cast<std::size_t>(i)};
}

inline std::vector<RegionId> parse_regions(const json& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError(field + " must be an array of region indices");
  std::vector<RegionId> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(parse_region(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

inline BrokerPolicy parse_broker_policy(const json& v, const std::string& field) {
  const auto s = v.is_string() ? v.get<std::string>() : std::string{};
  for (auto p : {BrokerPolicy::RoundRobin, BrokerPolicy::Proximity, BrokerPolicy::PerfOptimized,
                 BrokerPolicy::DynamicConfig})
    if (s == to_string(p)) return p;
  throw ConfigError(field + " must be one of round_robin, proximity, perf_optimized, dynamic_config");
}

inline LbPolicy parse_lb_policy(const json& v, const std::string& field) {
  const auto s = v.is_string() ? v.get<std::string>() : std::string{};
  for (auto p : {LbPolicy::RoundRobin, LbPolicy::Throttled, LbPolicy::ActiveMonitoring})
    if (s == to_string(p)) return p;
  throw ConfigError(field + " must be one of round_robin, throttled, active_monitoring");
}

template <typename T>
void parse_matrix(const json& v, const std::string& field, RegionMatrix<T>& out) {
  if (!v.is_array() || v.size() != kRegionCount)
    throw ConfigError(field + " must be a 6x6 array");
  for (std::size_t i = 0; i < kRegionCount; ++i) {
    if (!v[i].is_array() || v[i].size() != kRegionCount)
      throw ConfigError(field + "[" + std::to_string(i) + "] must have 6 entries");
    for (std::size_t j = 0; j < kRegionCount; ++j) {
      if (!v[i][j].is_number_integer())
        throw ConfigError(field + "[" + std::to_string(i) + "][" + std::to_string(j) + "] must be an integer");
      out[i][j] = v[i][j].get<T>();
    }
  }
}

inline UserBase parse_user_base(const json& v, const std::string& field) {
  if (!v.is_object()) throw ConfigError(field + " must be an object");
  reject_unknown(v, field,
                 {"id", "region", "peak_start_hour", "peak_end_hour", "users_peak", "users_offpeak",
                  "requests_per_user_per_hour", "request_size_bytes", "instruction_length"});
  for (auto required : {"id", "region", "peak_start_hour", "peak_end_hour", "users_peak", "users_offpeak"})
    if (!v.contains(required)) throw ConfigError(field + "." + required + " is required");
  UserBase ub;
  read(v, "id", field, ub.id);
  ub.region = parse_region(v["region"], field + ".region");
  read(v, "peak_start_hour", field, ub.peak_start_hour);
  read(v, "peak_end_hour", field, ub.peak_end_hour);
  read(v, "users_peak", field, ub.users_peak);
  read(v, "users_offpeak", field, ub.users_offpeak);
  read(v, "requests_per_user_per_hour", field, ub.requests_per_user_per_hour);
  read(v, "request_size_bytes", field, ub.request_size_bytes);
  read(v, "instruction_length", field, ub.instruction_length);
  return ub;
}

inline void parse_broker(const json& v, BrokerParams& b) {
  if (!v.is_object()) throw ConfigError("broker must be an object");
  reject_unknown(v, "broker",
                 {"policy", "tie_break", "smoothing_alpha", "prior_latency_factor", "k_up", "k_down",
                  "monitor_interval_ms", "min_vms", "max_vms"});
  if (v.contains("policy")) b.policy = parse_broker_policy(v["policy"], "broker.policy");
  if (v.contains("tie_break")) {
    const auto& t = v["tie_break"];
    if (t == "random") b.tie_break = TieBreak::Random;
    else if (t == "lowest_id") b.tie_break = TieBreak::LowestId;
    else throw ConfigError("broker.tie_break must be random or lowest_id");
  }
  read(v, "smoothing_alpha", "broker", b.smoothing_alpha);
  read(v, "prior_latency_factor", "broker", b.prior_latency_factor);
  read(v, "k_up", "broker", b.k_up);
  read(v, "k_down", "broker", b.k_down);
  read(v, "monitor_interval_ms", "broker", b.monitor_interval_ms);
  read(v, "min_vms", "broker", b.min_vms);
  if (v.contains("max_vms") && !v["max_vms"].is_null()) {
    std::int64_t m = 0;
    read(v, "max_vms", "broker", m);
    b.max_vms = m;
  }
}

}  // namespace detail

/// Builds a validated scenario from a config tree. Absent fields keep their
/// defaults; the `sweep` section, if any, is ignored here.
inline Scenario load_scenario(const nlohmann::json& doc) {
  using namespace detail;
  Scenario s;
  if (doc.is_null()) return s;
  if (!doc.is_object()) throw ConfigError("scenario document must be an object");
  reject_unknown(doc, "",
                 {"name", "seed", "duration_ms", "sim_start_gmt_hour", "user_count_divisor", "user_bases",
                  "dc_placement", "hosts_per_dc", "processors_per_host", "vm_count", "vm_capacity",
                  "internet", "broker", "lb_policy", "arrival_mode", "user_grouping_factor",
                  "request_grouping_factor", "sweep"});
  read(doc, "name", "", s.name);
  read(doc, "seed", "", s.seed);
  read(doc, "duration_ms", "", s.duration_ms);
  read(doc, "sim_start_gmt_hour", "", s.sim_start_gmt_hour);
  read(doc, "user_count_divisor", "", s.user_count_divisor);
  if (doc.contains("user_bases")) {
    const auto& arr = doc["user_bases"];
    if (!arr.is_array()) throw ConfigError("user_bases must be an array");
    s.user_bases.clear();
    for (std::size_t i = 0; i < arr.size(); ++i)
      s.user_bases.push_back(parse_user_base(arr[i], "user_bases[" + std::to_string(i) + "]"));
  }
  if (doc.contains("dc_placement")) s.dc_placement = parse_regions(doc["dc_placement"], "dc_placement");
  read(doc, "hosts_per_dc", "", s.hosts_per_dc);
  read(doc, "processors_per_host", "", s.processors_per_host);
  read(doc, "vm_count", "", s.vm_count);
  read(doc, "vm_capacity", "", s.vm_capacity);
  if (doc.contains("internet")) {
    const auto& net = doc["internet"];
    if (!net.is_object()) throw ConfigError("internet must be an object");
    reject_unknown(net, "internet", {"latency_ms", "bandwidth_bytes_per_ms"});
    if (net.contains("latency_ms")) parse_matrix(net["latency_ms"], "internet.latency_ms", s.internet.latency_ms);
    if (net.contains("bandwidth_bytes_per_ms"))
      parse_matrix(net["bandwidth_bytes_per_ms"], "internet.bandwidth_bytes_per_ms",
                   s.internet.bandwidth_bytes_per_ms);
  }
  if (doc.contains("broker")) parse_broker(doc["broker"], s.broker);
  if (doc.contains("lb_policy")) s.lb_policy = parse_lb_policy(doc["lb_policy"], "lb_policy");
  if (doc.contains("arrival_mode")) {
    const auto& m = doc["arrival_mode"];
    if (m == "deterministic") s.arrival_mode = ArrivalMode::Deterministic;
    else if (m == "poisson") s.arrival_mode = ArrivalMode::Poisson;
    else throw ConfigError("arrival_mode must be deterministic or poisson");
  }
  read(doc, "user_grouping_factor", "", s.user_grouping_factor);
  read(doc, "request_grouping_factor", "", s.request_grouping_factor);
  s.validate();
  return s;
}

/// Parses JSON text; syntax errors become ConfigError.
inline nlohmann::json parse_document(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return nlohmann::json(nullptr);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
}

inline nlohmann::json read_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_document(buf.str());
}

/// The sweep grid of a config document: its `sweep` section over the
/// document's own scenario as base.
inline SweepGrid load_sweep_grid(const nlohmann::json& doc) {
  using namespace detail;
  SweepGrid grid;
  grid.base = load_scenario(doc);
  if (!doc.is_object() || !doc.contains("sweep")) return grid;
  const auto& sw = doc["sweep"];
  if (!sw.is_object()) throw ConfigError("sweep must be an object");
  reject_unknown(sw, "sweep", {"dc_distributions", "broker_policies", "lb_policies"});
  if (sw.contains("dc_distributions")) {
    const auto& d = sw["dc_distributions"];
    if (!d.is_array() || d.empty()) throw ConfigError("sweep.dc_distributions must be a non-empty array");
    grid.dc_distributions.clear();
    for (std::size_t i = 0; i < d.size(); ++i) {
      auto regions = parse_regions(d[i], "sweep.dc_distributions[" + std::to_string(i) + "]");
      if (regions.empty())
        throw ConfigError("sweep.dc_distributions[" + std::to_string(i) + "] must be non-empty");
      grid.dc_distributions.push_back(std::move(regions));
    }
  }
  if (sw.contains("broker_policies")) {
    const auto& b = sw["broker_policies"];
    if (!b.is_array() || b.empty()) throw ConfigError("sweep.broker_policies must be a non-empty array");
    grid.broker_policies.clear();
    for (std::size_t i = 0; i < b.size(); ++i)
      grid.broker_policies.push_back(parse_broker_policy(b[i], "sweep.broker_policies[" + std::to_string(i) + "]"));
  }
  if (sw.contains("lb_policies")) {
    const auto& l = sw["lb_policies"];
    if (!l.is_array() || l.empty()) throw ConfigError("sweep.lb_policies must be a non-empty array");
    grid.lb_policies.clear();
    for (std::size_t i = 0; i < l.size(); ++i)
      grid.lb_policies.push_back(parse_lb_policy(l[i], "sweep.lb_policies[" + std::to_string(i) + "]"));
  }
  return grid;
}

}  // namespace brokersim

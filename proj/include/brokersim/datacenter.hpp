#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "types.hpp"

namespace brokersim {

enum class LbPolicy { RoundRobin, Throttled, ActiveMonitoring };

inline std::string_view to_string(LbPolicy p) {
  switch (p) {
    case LbPolicy::RoundRobin: return "round_robin";
    case LbPolicy::Throttled: return "throttled";
    case LbPolicy::ActiveMonitoring: return "active_monitoring";
  }
  return "?";
}

/// Part of a cloudlet small enough to be assigned to a single VM.
struct Slice {
  CloudletId cloudlet = 0;
  std::uint32_t index = 0;
  std::int64_t requests = 0;
  std::int64_t instructions = 0;

  friend bool operator==(const Slice&, const Slice&) = default;
};

struct Vm {
  VmId id = 0;
  std::int64_t capacity = 1'000'000;  // instruction units per second
  bool available = true;              // throttled index table entry
  std::int64_t outstanding = 0;       // assigned, not yet completed
  std::deque<Slice> queue;            // front is in service
  bool retired = false;               // scaled away; never allocated again

  [[nodiscard]] bool idle() const { return queue.empty(); }
};

/// Sizes of the service slices a cloudlet of `requests` splits into.
inline std::vector<std::int64_t> split_requests(std::int64_t requests, std::int64_t grouping_factor) {
  std::vector<std::int64_t> out;
  for (std::int64_t left = requests; left > 0; left -= grouping_factor)
    out.push_back(std::min(left, grouping_factor));
  return out;
}

/// Milliseconds a VM needs for `instructions`, rounded up.
inline SimTime service_time(std::int64_t instructions, std::int64_t capacity_per_second) {
  const __int128 scaled = static_cast<__int128>(instructions) * kMsPerSecond;
  return static_cast<SimTime>((scaled + capacity_per_second - 1) / capacity_per_second);
}

// Load balancer allocation rules. Each returns an index into `vms` and skips
// retired entries.

/// Cyclic allocation. The cursor holds the last index handed out and starts
/// at -1, so a fresh balancer hands out index 0 first.
inline std::size_t lb_rr_allocate(std::int64_t& cursor, std::span<const Vm> vms) {
  const auto n = static_cast<std::int64_t>(vms.size());
  if (n == 0) throw HardFault("lb_rr_allocate: no VMs");
  for (std::int64_t step = 1; step <= n; ++step) {
    const std::int64_t i = (((cursor + step) % n) + n) % n;
    if (!vms[static_cast<std::size_t>(i)].retired) {
      cursor = i;
      return static_cast<std::size_t>(i);
    }
  }
  throw HardFault("lb_rr_allocate: every VM is retired");
}

/// Lowest-indexed available VM, marked busy; nullopt when all are busy.
inline std::optional<std::size_t> lb_throttled_allocate(std::span<Vm> vms) {
  for (std::size_t i = 0; i < vms.size(); ++i) {
    if (!vms[i].retired && vms[i].available) {
      vms[i].available = false;
      return i;
    }
  }
  return std::nullopt;
}

/// VM with the fewest outstanding slices (lowest index on ties); its count
/// is incremented.
inline std::size_t lb_am_allocate(std::span<Vm> vms) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < vms.size(); ++i) {
    if (vms[i].retired) continue;
    if (!best || vms[i].outstanding < vms[*best].outstanding) best = i;
  }
  if (!best) throw HardFault("lb_am_allocate: no active VMs");
  ++vms[*best].outstanding;
  return *best;
}

/// A slice entering service on a VM.
struct SliceStart {
  VmId vm = 0;
  Slice slice;
  SimTime start = 0;
  SimTime end = 0;
};

/// Where one slice went on submission.
struct Placement {
  Slice slice;
  std::optional<VmId> vm;  // nullopt: queued at the controller
};

struct SubmitResult {
  std::vector<Placement> placements;
  std::vector<SliceStart> started;
};

struct CompletionResult {
  Slice finished;
  std::optional<SliceStart> started;     // next slice now running on this VM
  std::optional<CloudletId> cloudlet_done;
  std::optional<VmId> retired;           // VM went idle and was scaled away
};

struct AddVmResult {
  std::optional<VmId> vm;  // nullopt: cancelled a pending removal, or hosts full
  std::optional<SliceStart> started;
};

/// A data center and its controller: splits arriving cloudlets into slices,
/// consults the VM load balancer and runs each VM's FIFO one slice at a time.
class DataCenter {
 public:
  struct Config {
    DcId id = 0;
    RegionId region;
    std::int64_t hosts = 40;
    std::int64_t processors_per_host = 4;
    std::int64_t vm_count = 25;
    std::int64_t vm_capacity = 1'000'000;
    std::int64_t request_grouping_factor = 1'000;
    LbPolicy lb = LbPolicy::RoundRobin;
  };

  explicit DataCenter(const Config& cfg) : cfg_(cfg) {
    if (cfg.vm_count <= 0) throw ConfigError("vm_count must be > 0");
    if (cfg.vm_capacity <= 0) throw ConfigError("vm_capacity must be > 0");
    if (cfg.vm_count > max_vms_on_hosts())
      throw ConfigError("vm_count exceeds hosts * processors_per_host");
    if (cfg.request_grouping_factor <= 0) throw ConfigError("request_grouping_factor must be > 0");
    for (std::int64_t i = 0; i < cfg.vm_count; ++i) append_vm();
  }

  [[nodiscard]] DcId id() const { return cfg_.id; }
  [[nodiscard]] RegionId region() const { return cfg_.region; }
  [[nodiscard]] LbPolicy lb_policy() const { return cfg_.lb; }
  [[nodiscard]] const std::vector<Vm>& vms() const { return vms_; }
  [[nodiscard]] const std::deque<Slice>& pending() const { return pending_; }
  [[nodiscard]] std::int64_t max_vms_on_hosts() const { return cfg_.hosts * cfg_.processors_per_host; }

  /// Active VMs minus removals still waiting for an idle VM.
  [[nodiscard]] std::int64_t effective_vm_count() const {
    const auto active = std::count_if(vms_.begin(), vms_.end(), [](const Vm& v) { return !v.retired; });
    return static_cast<std::int64_t>(active) - pending_removals_;
  }

  SubmitResult submit(CloudletId cloudlet, std::int64_t requests, std::int64_t instructions_per_request,
                      SimTime now) {
    SubmitResult result;
    const auto sizes = split_requests(requests, cfg_.request_grouping_factor);
    if (sizes.empty()) throw HardFault("submit: empty cloudlet");
    remaining_[cloudlet] = static_cast<std::int64_t>(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      Slice s{cloudlet, static_cast<std::uint32_t>(i), sizes[i], sizes[i] * instructions_per_request};
      const std::optional<std::size_t> idx = allocate();
      if (!idx) {
        pending_.push_back(s);
        result.placements.push_back({s, std::nullopt});
        continue;
      }
      result.placements.push_back({s, vms_[*idx].id});
      if (auto st = enqueue(*idx, s, now)) result.started.push_back(*st);
    }
    return result;
  }

  CompletionResult service_complete(VmId vm_id, const Slice& slice, SimTime now) {
    Vm& vm = vms_.at(vm_id);
    if (vm.queue.empty() || vm.queue.front() != slice)
      throw HardFault("service_complete: slice not in service on VM " + std::to_string(vm_id));
    CompletionResult result{slice, std::nullopt, std::nullopt, std::nullopt};
    vm.queue.pop_front();
    --vm.outstanding;

    if (cfg_.lb == LbPolicy::Throttled) {
      vm.available = true;
      if (!pending_.empty() && !(pending_removals_ > 0)) {
        Slice next = pending_.front();
        pending_.pop_front();
        vm.available = false;
        ++vm.outstanding;
        result.started = enqueue(vm_id, next, now);
      }
    } else if (!vm.queue.empty()) {
      result.started = start_front(vm, now);
    }
    if (vm.idle() && retire_if_requested(vm_id)) result.retired = vm_id;

    auto it = remaining_.find(slice.cloudlet);
    if (it == remaining_.end()) throw HardFault("service_complete: unknown cloudlet");
    if (--it->second == 0) {
      remaining_.erase(it);
      result.cloudlet_done = slice.cloudlet;
    }
    return result;
  }

  /// Brings up one more VM. Under Throttled it immediately takes the head of
  /// the controller queue.
  AddVmResult add_vm(SimTime now) {
    if (pending_removals_ > 0) {
      --pending_removals_;
      return {};
    }
    std::size_t idx = vms_.size();
    for (std::size_t i = 0; i < vms_.size(); ++i)
      if (vms_[i].retired) { idx = i; break; }
    if (idx == vms_.size()) {
      if (static_cast<std::int64_t>(vms_.size()) >= max_vms_on_hosts()) return {};
      append_vm();
    } else {
      vms_[idx] = make_vm(vms_[idx].id);
    }
    AddVmResult result{vms_[idx].id, std::nullopt};
    if (cfg_.lb == LbPolicy::Throttled && !pending_.empty()) {
      Slice next = pending_.front();
      pending_.pop_front();
      vms_[idx].available = false;
      ++vms_[idx].outstanding;
      result.started = enqueue(idx, next, now);
    }
    return result;
  }

  /// Retires the highest-indexed idle VM now (returned), or else the next
  /// VM to go idle.
  std::optional<VmId> remove_vm() {
    if (effective_vm_count() <= 1) return std::nullopt;
    for (std::size_t i = vms_.size(); i-- > 0;) {
      if (!vms_[i].retired && vms_[i].idle()) {
        vms_[i].retired = true;
        vms_[i].available = false;
        return vms_[i].id;
      }
    }
    ++pending_removals_;
    return std::nullopt;
  }

  [[nodiscard]] std::size_t in_flight_cloudlets() const { return remaining_.size(); }

 private:
  void append_vm() { vms_.push_back(make_vm(vms_.size())); }

  [[nodiscard]] Vm make_vm(VmId id) const {
    Vm vm;
    vm.id = id;
    vm.capacity = cfg_.vm_capacity;
    return vm;
  }

  std::optional<std::size_t> allocate() {
    switch (cfg_.lb) {
      case LbPolicy::RoundRobin: {
        const auto i = lb_rr_allocate(rr_cursor_, vms_);
        ++vms_[i].outstanding;
        return i;
      }
      case LbPolicy::Throttled: {
        if (pending_removals_ > 0) return std::nullopt;
        auto i = lb_throttled_allocate(vms_);
        if (i) ++vms_[*i].outstanding;
        return i;
      }
      case LbPolicy::ActiveMonitoring: return lb_am_allocate(vms_);
    }
    return std::nullopt;
  }

  std::optional<SliceStart> enqueue(std::size_t idx, const Slice& s, SimTime now) {
    Vm& vm = vms_[idx];
    vm.queue.push_back(s);
    if (vm.queue.size() == 1) return start_front(vm, now);
    return std::nullopt;
  }

  static SliceStart start_front(const Vm& vm, SimTime now) {
    const Slice& s = vm.queue.front();
    return {vm.id, s, now, now + service_time(s.instructions, vm.capacity)};
  }

  bool retire_if_requested(std::size_t idx) {
    if (pending_removals_ == 0 || vms_[idx].retired) return false;
    vms_[idx].retired = true;
    vms_[idx].available = false;
    --pending_removals_;
    return true;
  }

  Config cfg_;
  std::vector<Vm> vms_;
  std::deque<Slice> pending_;
  std::int64_t rr_cursor_ = -1;
  std::int64_t pending_removals_ = 0;
  std::unordered_map<CloudletId, std::int64_t> remaining_;
};

}  // namespace brokersim

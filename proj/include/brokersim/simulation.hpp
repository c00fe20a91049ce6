#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "broker.hpp"
#include "datacenter.hpp"
#include "event_queue.hpp"
#include "metrics.hpp"
#include "rng.hpp"
#include "scenario.hpp"
#include "workload.hpp"

namespace brokersim {

/// Optional observer of a run's lifecycle. All hooks default to no-ops.
class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void on_event(const Event&) {}
  virtual void on_placement(DcId, const Placement&, SimTime) {}
  virtual void on_slice_start(DcId, const SliceStart&) {}
  virtual void on_slice_end(DcId, VmId, const Slice&, SimTime) {}
  virtual void on_cloudlet_complete(const Cloudlet&) {}
  virtual void on_vm_added(DcId, VmId, SimTime) {}
  virtual void on_vm_retired(DcId, VmId, SimTime) {}
};

struct RunStats {
  std::int64_t cloudlets_emitted = 0;
  std::int64_t requests_emitted = 0;
  std::int64_t cloudlets_completed = 0;
  std::int64_t requests_completed = 0;
  std::uint64_t events_processed = 0;
  SimTime end_clock = 0;

  friend bool operator==(const RunStats&, const RunStats&) = default;
};

struct RunResult {
  MetricsStore metrics;
  RunStats stats;
  std::vector<std::string> ub_order;

  [[nodiscard]] Summary summary() const { return summarize(metrics, ub_order); }
};

/// One simulation run over a validated scenario. Not shareable across
/// threads; independent instances are.
class Simulation {
 public:
  explicit Simulation(Scenario scenario, TraceSink* trace = nullptr)
      : sc_(std::move(scenario)),
        trace_(trace),
        user_bases_(sc_.effective_user_bases()),
        broker_(sc_.broker, sc_.dc_placement.size(), sc_.vm_count),
        broker_rng_(derive_seed(sc_.seed, "broker")) {
    for (DcId i = 0; i < sc_.dc_placement.size(); ++i) {
      dcs_.emplace_back(DataCenter::Config{i, sc_.dc_placement[i], sc_.hosts_per_dc, sc_.processors_per_host,
                                           sc_.vm_count, sc_.vm_capacity, sc_.request_grouping_factor,
                                           sc_.lb_policy});
    }
    for (const auto& ub : user_bases_) result_.ub_order.push_back(ub.id);
  }

  RunResult run() {
    if (ran_) throw HardFault("Simulation::run called twice");
    ran_ = true;
    schedule_workload();
    if (sc_.broker.policy == BrokerPolicy::DynamicConfig && !queue_.empty())
      queue_.schedule(Event{.fire_at = sc_.broker.monitor_interval_ms, .kind = EventKind::MonitorTick});

    while (!queue_.empty()) {
      const Event e = queue_.pop();
      ++result_.stats.events_processed;
      if (trace_) trace_->on_event(e);
      switch (e.kind) {
        case EventKind::CloudletEmit: on_emit(e); break;
        case EventKind::RequestArriveAtDC: on_arrive(e); break;
        case EventKind::ServiceComplete: on_service_complete(e); break;
        case EventKind::ResponseArriveAtUB: on_response(e); break;
        case EventKind::MonitorTick: on_monitor_tick(e); break;
      }
    }
    result_.stats.end_clock = queue_.now();
    return std::move(result_);
  }

  [[nodiscard]] const std::vector<Cloudlet>& cloudlets() const { return cloudlets_; }
  [[nodiscard]] const std::vector<DataCenter>& data_centers() const { return dcs_; }

 private:
  void schedule_workload() {
    const GenerationParams gp{sc_.sim_start_gmt_hour, sc_.duration_ms, sc_.user_grouping_factor,
                              sc_.arrival_mode};
    for (UbIndex u = 0; u < user_bases_.size(); ++u) {
      Rng rng(derive_seed(sc_.seed, "workload/" + user_bases_[u].id));
      for (const Emission& em : generate(user_bases_[u], gp, rng)) {
        queue_.schedule(Event{.fire_at = em.at, .kind = EventKind::CloudletEmit, .ub = u, .amount = em.group_size});
      }
    }
  }

  DcId select_dc(RegionId origin) {
    switch (sc_.broker.policy) {
      case BrokerPolicy::RoundRobin: return select_round_robin(broker_, dcs_.size());
      case BrokerPolicy::PerfOptimized:
        return select_perf_optimized(broker_, origin, sc_.dc_placement, sc_.internet);
      case BrokerPolicy::Proximity:
      case BrokerPolicy::DynamicConfig:
        return select_proximity(origin, sc_.dc_placement, sc_.internet, broker_rng_, sc_.broker.tie_break);
    }
    throw HardFault("unknown broker policy");
  }

  void on_emit(const Event& e) {
    const UserBase& ub = user_bases_[e.ub];
    Cloudlet c;
    c.id = cloudlets_.size();
    c.origin = e.ub;
    c.group_size = e.amount;
    c.total_instructions = e.amount * ub.instruction_length;
    c.payload_size = e.amount * ub.request_size_bytes;
    c.emitted_at = e.fire_at;
    const DcId dc = select_dc(ub.region);
    c.assigned_dc = dc;
    cloudlets_.push_back(c);
    ++result_.stats.cloudlets_emitted;
    result_.stats.requests_emitted += c.group_size;

    const SimTime delay = sc_.internet.transfer_delay(ub.region, dcs_[dc].region(), c.payload_size);
    queue_.schedule(Event{.fire_at = e.fire_at + delay, .kind = EventKind::RequestArriveAtDC,
                          .cloudlet = c.id, .dc = dc, .ub = e.ub});
  }

  void start_slice(DcId dc, const SliceStart& st) {
    Cloudlet& c = cloudlets_.at(st.slice.cloudlet);
    if (!c.service_start_at) {
      c.service_start_at = st.start;
      c.assigned_vm = st.vm;
    }
    if (trace_) trace_->on_slice_start(dc, st);
    queue_.schedule(Event{.fire_at = st.end, .kind = EventKind::ServiceComplete, .cloudlet = st.slice.cloudlet,
                          .dc = dc, .vm = st.vm, .slice = st.slice.index});
  }

  void on_arrive(const Event& e) {
    Cloudlet& c = cloudlets_.at(e.cloudlet);
    c.arrived_dc_at = e.fire_at;
    const auto res = dcs_[e.dc].submit(c.id, c.group_size, user_bases_[c.origin].instruction_length, e.fire_at);
    if (trace_)
      for (const Placement& p : res.placements) trace_->on_placement(e.dc, p, e.fire_at);
    for (const SliceStart& st : res.started) start_slice(e.dc, st);
  }

  void on_service_complete(const Event& e) {
    DataCenter& dc = dcs_[e.dc];
    const Vm& vm = dc.vms().at(e.vm);
    if (vm.queue.empty()) throw HardFault("service completion on an idle VM");
    const Slice slice = vm.queue.front();
    if (slice.cloudlet != e.cloudlet || slice.index != e.slice)
      throw HardFault("service completion does not match the slice in service");
    const auto res = dc.service_complete(e.vm, slice, e.fire_at);
    if (trace_) {
      trace_->on_slice_end(e.dc, e.vm, slice, e.fire_at);
      if (res.retired) trace_->on_vm_retired(e.dc, *res.retired, e.fire_at);
    }
    if (res.started) {
      // Only Throttled assigns new work here; otherwise the VM's own queue advances.
      if (trace_ && dc.lb_policy() == LbPolicy::Throttled)
        trace_->on_placement(e.dc, Placement{res.started->slice, res.started->vm}, e.fire_at);
      start_slice(e.dc, *res.started);
    }
    if (res.cloudlet_done) {
      Cloudlet& c = cloudlets_.at(*res.cloudlet_done);
      c.service_end_at = e.fire_at;
      const RegionId origin = user_bases_[c.origin].region;
      const SimTime delay = sc_.internet.transfer_delay(dc.region(), origin, c.payload_size);
      queue_.schedule(Event{.fire_at = e.fire_at + delay, .kind = EventKind::ResponseArriveAtUB,
                            .cloudlet = c.id, .dc = e.dc, .ub = c.origin});
    }
  }

  void on_response(const Event& e) {
    Cloudlet& c = cloudlets_.at(e.cloudlet);
    c.response_at = e.fire_at;
    result_.metrics.record(c, user_bases_[c.origin].id);
    ++result_.stats.cloudlets_completed;
    result_.stats.requests_completed += c.group_size;
    record_response_sample(broker_, *c.assigned_dc, c.response_time(), c.processing_time());
    if (trace_) trace_->on_cloudlet_complete(c);
  }

  void on_monitor_tick(const Event& e) {
    std::vector<std::int64_t> counts;
    for (const auto& dc : dcs_) counts.push_back(dc.effective_vm_count());
    for (const ScalingAction& a : dynamic_config_tick(broker_, counts)) {
      if (a.delta > 0) {
        const AddVmResult added = dcs_[a.dc].add_vm(e.fire_at);
        if (added.vm && trace_) trace_->on_vm_added(a.dc, *added.vm, e.fire_at);
        if (added.started) {
          if (trace_) trace_->on_placement(a.dc, Placement{added.started->slice, added.started->vm}, e.fire_at);
          start_slice(a.dc, *added.started);
        }
      } else if (auto gone = dcs_[a.dc].remove_vm(); gone && trace_) {
        trace_->on_vm_retired(a.dc, *gone, e.fire_at);
      }
    }
    // Keep ticking only while other work remains.
    if (!queue_.empty())
      queue_.schedule(Event{.fire_at = e.fire_at + sc_.broker.monitor_interval_ms, .kind = EventKind::MonitorTick});
  }

  Scenario sc_;
  TraceSink* trace_;
  std::vector<UserBase> user_bases_;
  std::vector<DataCenter> dcs_;
  BrokerState broker_;
  Rng broker_rng_;
  EventQueue queue_;
  std::vector<Cloudlet> cloudlets_;
  RunResult result_;
  bool ran_ = false;
};

/// Runs a scenario to completion, draining in-flight work past the duration.
inline RunResult run(const Scenario& scenario, TraceSink* trace = nullptr) {
  scenario.validate();
  return Simulation(scenario, trace).run();
}

}  // namespace brokersim

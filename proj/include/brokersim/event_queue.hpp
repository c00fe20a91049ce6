#pragma once

#include <cstdint>
#include <queue>
#include <string>
#include <vector>

#include "types.hpp"

namespace brokersim {

enum class EventKind : std::uint8_t {
  CloudletEmit,
  RequestArriveAtDC,
  ServiceComplete,
  ResponseArriveAtUB,
  MonitorTick,
};

/// A scheduled occurrence. Payload fields are interpreted per kind; unused
/// ones stay zero.
struct Event {
  SimTime fire_at = 0;
  std::uint64_t sequence = 0;  // assigned by EventQueue::schedule
  EventKind kind = EventKind::MonitorTick;
  CloudletId cloudlet = 0;
  DcId dc = 0;
  VmId vm = 0;
  UbIndex ub = 0;
  std::uint64_t slice = 0;
  std::int64_t amount = 0;  // CloudletEmit: group size
};

/// Time-ordered event queue plus the simulation clock. Ties on fire_at pop
/// in scheduling order.
class EventQueue {
 public:
  /// Returns the sequence number given to the event.
  std::uint64_t schedule(Event event) {
    if (event.fire_at < now_) {
      throw HardFault("event scheduled in the past: fire_at=" + std::to_string(event.fire_at) +
                      " now=" + std::to_string(now_));
    }
    event.sequence = next_sequence_++;
    heap_.push(event);
    return event.sequence;
  }

  [[nodiscard]] bool empty() const { return heap_.empty(); }
  [[nodiscard]] std::size_t size() const { return heap_.size(); }
  [[nodiscard]] SimTime now() const { return now_; }
  [[nodiscard]] const Event& peek() const { return heap_.top(); }

  /// Removes the earliest event and advances the clock to its time.
  Event pop() {
    Event e = heap_.top();
    heap_.pop();
    now_ = e.fire_at;
    return e;
  }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.sequence > b.sequence;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_sequence_ = 0;
  SimTime now_ = 0;
};

}  // namespace brokersim

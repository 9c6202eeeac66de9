#pragma once

// Deterministic discrete-event core. Events dequeue in non-decreasing time
// order; ties break by (actor id, sequence number), so replays are stable
// regardless of insertion order.

#include <cstdint>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace sba {

struct SimEvent {
  double time = 0.0;
  std::string actor;
  std::uint64_t seq = 0;
  std::function<void()> action;
};

class EventQueue {
 public:
  /// Throws std::invalid_argument when time lies before the current clock.
  void schedule(double time, std::string actor, std::function<void()> action) {
    if (time < now_) {
      throw std::invalid_argument("cannot schedule event at t=" +
                                  std::to_string(time) +
                                  " before current time t=" +
                                  std::to_string(now_));
    }
    events_.insert(Entry{time, std::move(actor), next_seq_++,
                         std::move(action)});
  }

  bool empty() const { return events_.empty(); }
  std::size_t size() const { return events_.size(); }
  double now() const { return now_; }

  /// Time of the earliest pending event; meaningless when empty().
  double next_time() const { return events_.begin()->time; }

  /// Removes and returns the earliest event, advancing the clock to it.
  SimEvent pop() {
    auto it = events_.begin();
    SimEvent ev{it->time, it->actor, it->seq, std::move(it->action)};
    events_.erase(it);
    now_ = ev.time;
    return ev;
  }

  /// Runs every event with time <= horizon, then advances the clock to
  /// horizon if it lies beyond the last executed event.
  void run_until(double horizon) {
    while (!events_.empty() && events_.begin()->time <= horizon) {
      SimEvent ev = pop();
      ev.action();
    }
    if (horizon > now_) now_ = horizon;
  }

 private:
  struct Entry {
    double time;
    std::string actor;
    std::uint64_t seq;
    mutable std::function<void()> action;

    bool operator<(const Entry& other) const {
      if (time != other.time) return time < other.time;
      if (actor != other.actor) return actor < other.actor;
      return seq < other.seq;
    }
  };

  std::set<Entry> events_;
  std::uint64_t next_seq_ = 0;
  double now_ = 0.0;
};

}  // namespace sba

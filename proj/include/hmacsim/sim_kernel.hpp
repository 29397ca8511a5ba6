#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <queue>
#include <random>
#include <stdexcept>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "hmacsim/types.hpp"

namespace hmacsim {

class SimError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct EventHandle {
    std::uint64_t seq = 0;
};

// Labels an event for the optional trace dump. kind must outlive the queue (use literals).
struct EventTag {
    std::int64_t node = -1;
    std::string_view kind = "event";
};

// Deterministic discrete-event queue. Events run in (fire_at, seq) order, so equal-time events
// run in insertion order. Single-threaded by contract.
class EventQueue {
public:
    using Action = std::function<void()>;

    EventHandle schedule(Micros fire_at, Action action, EventTag tag = {});
    EventHandle schedule_in(Micros delay, Action action, EventTag tag = {}) {
        return schedule(now_ + delay, std::move(action), tag);
    }

    // Returns false if the event already ran, was already cancelled, or never existed.
    bool cancel(EventHandle handle);

    // Runs every event with fire_at <= end_time, then advances the clock to end_time.
    std::size_t run_until(Micros end_time);

    Micros now() const { return now_; }
    std::size_t pending() const { return heap_.size() - cancelled_.size(); }
    std::uint64_t executed() const { return executed_; }

    // One line per executed event: "<time> <node> <kind>".
    void set_trace(std::ostream* out) { trace_ = out; }

private:
    struct Entry {
        Micros fire_at;
        std::uint64_t seq;
        EventTag tag;
        Action action;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            return a.fire_at != b.fire_at ? a.fire_at > b.fire_at : a.seq > b.seq;
        }
    };

    std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
    std::unordered_set<std::uint64_t> live_;
    std::unordered_set<std::uint64_t> cancelled_;
    Micros now_ = 0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t executed_ = 0;
    Micros last_fire_ = 0;
    std::uint64_t last_seq_ = 0;
    std::ostream* trace_ = nullptr;
};

// PTP-disciplined node clock: local(t) = t + offset + round(drift_ppm * t / 1e6).
struct Clock {
    Micros offset = 0;
    double drift_ppm = 0.0;

    Micros local_time(Micros true_time) const;
    // Smallest true time whose local reading is >= local.
    Micros true_time_at(Micros local) const;
};

inline Micros local_time(const Clock& clock, Micros true_time) { return clock.local_time(true_time); }

enum class Stream : std::uint32_t { Backoff = 1, Traffic = 2, Control = 3 };

using Rng = std::mt19937_64;

// Independent deterministic substream per (seed, node, purpose).
Rng make_substream(std::uint64_t seed, std::uint32_t node, Stream purpose);

}  // namespace hmacsim

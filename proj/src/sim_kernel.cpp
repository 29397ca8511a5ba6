#include "hmacsim/sim_kernel.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace hmacsim {

EventHandle EventQueue::schedule(Micros fire_at, Action action, EventTag tag) {
    if (fire_at < now_) {
        throw SimError("cannot schedule at " + std::to_string(fire_at) + " us, now is " + std::to_string(now_));
    }
    const std::uint64_t seq = next_seq_++;
    heap_.push(Entry{fire_at, seq, tag, std::move(action)});
    live_.insert(seq);
    return EventHandle{seq};
}

bool EventQueue::cancel(EventHandle handle) {
    if (live_.erase(handle.seq) == 0) return false;
    cancelled_.insert(handle.seq);
    return true;
}

std::size_t EventQueue::run_until(Micros end_time) {
    std::size_t count = 0;
    while (!heap_.empty() && heap_.top().fire_at <= end_time) {
        Entry entry = std::move(const_cast<Entry&>(heap_.top()));
        heap_.pop();
        if (cancelled_.erase(entry.seq) > 0) continue;
        live_.erase(entry.seq);

        if (executed_ > 0 && (entry.fire_at < last_fire_ || (entry.fire_at == last_fire_ && entry.seq < last_seq_))) {
            throw SimError("event order violated at " + std::to_string(entry.fire_at));
        }
        last_fire_ = entry.fire_at;
        last_seq_ = entry.seq;
        now_ = entry.fire_at;

        if (trace_ != nullptr) *trace_ << entry.fire_at << ' ' << entry.tag.node << ' ' << entry.tag.kind << '\n';
        entry.action();
        ++executed_;
        ++count;
    }
    if (end_time > now_) now_ = end_time;
    return count;
}

Micros Clock::local_time(Micros true_time) const {
    return true_time + offset + std::llround(drift_ppm * static_cast<double>(true_time) / 1e6);
}

Micros Clock::true_time_at(Micros local) const {
    const double rate = 1.0 + drift_ppm / 1e6;
    auto t = static_cast<Micros>(std::ceil(static_cast<double>(local - offset) / rate));
    while (local_time(t) < local) ++t;
    while (local_time(t - 1) >= local) --t;
    return t;
}

Rng make_substream(std::uint64_t seed, std::uint32_t node, Stream purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32), node,
                      static_cast<std::uint32_t>(purpose)};
    return Rng(seq);
}

}  // namespace hmacsim

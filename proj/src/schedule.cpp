#include "hmacsim/schedule.hpp"

#include <string>

namespace hmacsim {

bool AccessPolicy::permits(const MacAddress& dest, std::uint8_t tid) const {
    if (allow_all_) return true;
    for (const auto& e : entries_) {
        if (e.dest == dest && tos_to_tid(e.tos) == tid) return true;
    }
    return false;
}

Superframe::Superframe(std::size_t total_slots, Micros slot_duration) : slot_duration_(slot_duration) {
    if (total_slots == 0) throw ScheduleError("superframe needs at least one slot");
    if (slot_duration <= 0) throw ScheduleError("slot duration must be positive");
    if (slot_duration > kMicrosPerSecond ||
        static_cast<Micros>(total_slots) > kMicrosPerSecond / slot_duration) {
        throw ScheduleError("superframe of " + std::to_string(total_slots) + " x " + std::to_string(slot_duration) +
                            " us exceeds the 1 s alignment period");
    }
    policies_.assign(total_slots, AccessPolicy::guard());
}

const AccessPolicy& Superframe::policy(std::size_t slot_index) const {
    if (slot_index >= policies_.size()) {
        throw ScheduleError("slot index " + std::to_string(slot_index) + " out of range");
    }
    return policies_[slot_index];
}

Superframe new_superframe(std::size_t total_slots, Micros slot_duration) {
    return Superframe(total_slots, slot_duration);
}

Superframe set_access_policy(Superframe superframe, std::size_t slot_index, AccessPolicy policy) {
    if (slot_index >= superframe.policies_.size()) {
        throw ScheduleError("slot index " + std::to_string(slot_index) + " out of range");
    }
    superframe.policies_[slot_index] = std::move(policy);
    return superframe;
}

bool is_allowed(const Superframe& superframe, std::size_t slot_index, const MacAddress& dest, std::uint8_t tid) {
    return superframe.policy(slot_index).permits(dest, tid);
}

namespace {

Micros within_second(Micros t) {
    Micros r = t % kMicrosPerSecond;
    return r < 0 ? r + kMicrosPerSecond : r;
}

Micros tail_start(const Superframe& sf) { return (kMicrosPerSecond / sf.length()) * sf.length(); }

}  // namespace

SlotPosition slot_at(const Superframe& superframe, Micros local_time) {
    const Micros t = within_second(local_time);
    const Micros tail = tail_start(superframe);
    if (t >= tail) {
        return SlotPosition{superframe.total_slots() - 1, t - tail, true};
    }
    const Micros d = superframe.slot_duration();
    const auto slot = static_cast<std::size_t>(t / d);
    return SlotPosition{slot % superframe.total_slots(), t % d, false};
}

Micros next_slot_boundary(const Superframe& superframe, Micros local_time) {
    const Micros t = within_second(local_time);
    const Micros second_start = local_time - t;
    const Micros tail = tail_start(superframe);
    if (t >= tail) return second_start + kMicrosPerSecond;
    const Micros d = superframe.slot_duration();
    return second_start + (t / d + 1) * d;
}

bool is_allowed_at(const Superframe& superframe, const SlotPosition& position, const MacAddress& dest,
                   std::uint8_t tid) {
    return !position.tail_guard && is_allowed(superframe, position.index, dest, tid);
}

GateSet gate_set_for(const Superframe& superframe, std::size_t slot_index, std::span<const QueueKey> known_queues) {
    GateSet out;
    const AccessPolicy& policy = superframe.policy(slot_index);
    for (const auto& key : known_queues) {
        if (!policy.permits(key.dest, key.tid)) out.paused.insert(key);
    }
    return out;
}

GateSet gate_set_for(const Superframe& superframe, const SlotPosition& position,
                     std::span<const QueueKey> known_queues) {
    if (position.tail_guard) return GateSet{{known_queues.begin(), known_queues.end()}};
    return gate_set_for(superframe, position.index, known_queues);
}

}  // namespace hmacsim

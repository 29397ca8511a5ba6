#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "hmacsim/types.hpp"

namespace hmacsim {

class ScheduleError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// IP precedence bits select the 802.11e TID.
constexpr std::uint8_t tos_to_tid(std::uint8_t tos) { return static_cast<std::uint8_t>(tos >> 5); }
constexpr std::uint8_t tid_to_tos(std::uint8_t tid) { return static_cast<std::uint8_t>((tid & 0x7) << 5); }

struct PolicyEntry {
    MacAddress dest;
    std::uint8_t tos = 0;

    friend auto operator<=>(const PolicyEntry&, const PolicyEntry&) = default;
};

// Which (destination, ToS) pairs may transmit in a slot. No entries and allow_all unset is a guard slot.
class AccessPolicy {
public:
    static AccessPolicy guard() { return {}; }
    static AccessPolicy open() {
        AccessPolicy p;
        p.allow_all_ = true;
        return p;
    }

    AccessPolicy& add(const MacAddress& dest, std::uint8_t tos) {
        entries_.insert(PolicyEntry{dest, tos});
        return *this;
    }
    AccessPolicy& disable_all() {
        entries_.clear();
        allow_all_ = false;
        return *this;
    }
    AccessPolicy& allow_all() {
        allow_all_ = true;
        return *this;
    }

    bool is_guard() const { return !allow_all_ && entries_.empty(); }
    bool allows_all() const { return allow_all_; }
    const std::set<PolicyEntry>& entries() const { return entries_; }

    bool permits(const MacAddress& dest, std::uint8_t tid) const;

    friend bool operator==(const AccessPolicy&, const AccessPolicy&) = default;

private:
    std::set<PolicyEntry> entries_;
    bool allow_all_ = false;
};

struct QueueKey {
    MacAddress dest;
    std::uint8_t tid = 0;

    friend auto operator<=>(const QueueKey&, const QueueKey&) = default;
};

struct GateSet {
    std::set<QueueKey> paused;

    friend bool operator==(const GateSet&, const GateSet&) = default;
};

struct SlotPosition {
    std::size_t index = 0;
    Micros into_slot = 0;
    bool tail_guard = false;  // inside the remainder of the second after the last whole superframe

    friend bool operator==(const SlotPosition&, const SlotPosition&) = default;
};

class Superframe {
public:
    // All slots start as guard slots. Throws ScheduleError unless 1 <= total_slots,
    // 0 < slot_duration and total_slots * slot_duration <= 1 s.
    Superframe(std::size_t total_slots, Micros slot_duration);

    std::size_t total_slots() const { return policies_.size(); }
    Micros slot_duration() const { return slot_duration_; }
    Micros length() const { return slot_duration_ * static_cast<Micros>(policies_.size()); }
    const AccessPolicy& policy(std::size_t slot_index) const;
    const std::vector<AccessPolicy>& policies() const { return policies_; }

    friend bool operator==(const Superframe&, const Superframe&) = default;

private:
    friend Superframe set_access_policy(Superframe, std::size_t, AccessPolicy);

    Micros slot_duration_;
    std::vector<AccessPolicy> policies_;
};

Superframe new_superframe(std::size_t total_slots, Micros slot_duration);

Superframe set_access_policy(Superframe superframe, std::size_t slot_index, AccessPolicy policy);
inline Superframe update_access_policy(Superframe superframe, std::size_t slot_index, AccessPolicy policy) {
    return set_access_policy(std::move(superframe), slot_index, std::move(policy));
}
inline Superframe remove_access_policy(Superframe superframe, std::size_t slot_index) {
    return set_access_policy(std::move(superframe), slot_index, AccessPolicy::guard());
}

bool is_allowed(const Superframe& superframe, std::size_t slot_index, const MacAddress& dest, std::uint8_t tid);

// Superframes restart at every second boundary of local_time; negative times wrap into the previous second.
SlotPosition slot_at(const Superframe& superframe, Micros local_time);

// Local time of the next slot edge strictly after local_time (slot starts, tail start, second boundary).
Micros next_slot_boundary(const Superframe& superframe, Micros local_time);

bool is_allowed_at(const Superframe& superframe, const SlotPosition& position, const MacAddress& dest,
                   std::uint8_t tid);

GateSet gate_set_for(const Superframe& superframe, std::size_t slot_index, std::span<const QueueKey> known_queues);
GateSet gate_set_for(const Superframe& superframe, const SlotPosition& position,
                     std::span<const QueueKey> known_queues);

}  // namespace hmacsim

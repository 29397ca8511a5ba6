#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "hmacsim/dcf_mac.hpp"
#include "hmacsim/schedule.hpp"
#include "hmacsim/sim_kernel.hpp"
#include "hmacsim/topology.hpp"

namespace hmacsim {

enum class GateAction { Pause, Unpause };

struct GateCommand {
    GateAction action = GateAction::Pause;
    QueueKey key;
    std::size_t issued_at_slot = 0;

    friend bool operator==(const GateCommand&, const GateCommand&) = default;
};

// User-space scheduler daemon of one node: tracks the gate set it last requested and, at each
// slot boundary of its local clock, emits the per-queue difference to the next slot's gate set.
class SchedulerDaemon {
public:
    SchedulerDaemon(Superframe superframe, std::vector<QueueKey> known_queues);

    // Commands bringing the requested gate set to the one for the slot containing local_time.
    std::vector<GateCommand> slot_tick(Micros local_time);

    const Superframe& superframe() const { return superframe_; }
    const GateSet& requested() const { return requested_; }
    const std::vector<QueueKey>& known_queues() const { return known_; }

private:
    Superframe superframe_;
    std::vector<QueueKey> known_;
    GateSet requested_;  // all queues start unpaused
};

struct ControlChannelParams {
    Micros base_latency = 0;
    Micros jitter = 0;  // delivery delay adds U(0, jitter)
};

// FIFO latency channel between daemon and driver. A command is applied at
// max(send + base_latency + U(0, jitter), previous delivery), so commands never overtake.
class ControlChannel {
public:
    using Sink = std::function<void(const GateCommand&)>;

    ControlChannel(EventQueue& events, ControlChannelParams params, Rng rng, Sink sink);

    // Returns the true time at which the command takes effect.
    Micros deliver(const GateCommand& command);

    std::size_t in_transit() const { return in_transit_; }

private:
    EventQueue& events_;
    ControlChannelParams params_;
    Rng rng_;
    Sink sink_;
    Micros last_delivery_ = 0;
    std::size_t in_transit_ = 0;
};

struct GateApplication {
    Micros applied_at = 0;
    NodeId node;
    GateCommand command;
};

// Daemon + channel for one node, ticking on the node's local clock and driving the MAC's queues.
class NodeController {
public:
    NodeController(EventQueue& events, DcfNetwork& mac, const Topology& topology, NodeId node, Superframe superframe,
                   std::vector<QueueKey> known_queues, Clock clock, ControlChannelParams channel, std::uint64_t seed,
                   std::vector<GateApplication>* gate_log = nullptr);

    NodeController(const NodeController&) = delete;
    NodeController& operator=(const NodeController&) = delete;

    // Applies the current slot's gate set directly to the driver and starts ticking.
    void install();

    const SchedulerDaemon& daemon() const { return daemon_; }
    const Clock& clock() const { return clock_; }
    NodeId node() const { return node_; }

private:
    void tick();
    void schedule_next_tick();
    void apply(const GateCommand& command);

    EventQueue& events_;
    DcfNetwork& mac_;
    const Topology& topology_;
    NodeId node_;
    Clock clock_;
    SchedulerDaemon daemon_;
    ControlChannel channel_;
    std::vector<GateApplication>* gate_log_;
};

std::vector<QueueKey> known_queues_of(const Topology& topology, std::span<const Link> links, NodeId node);

// True if a data frame starting at true time `start` on (dst, tid) breaks the sender's schedule.
bool violates_schedule(const Superframe& superframe, Micros start, const MacAddress& dest, std::uint8_t tid);

// Data transmissions that start inside a true-time slot whose policy forbids their link. A frame
// whose exchange was already on the air at a slot edge completes without starting anew, so only
// genuine starts are counted. Nodes without an entry in `schedules` are unscheduled.
std::size_t overrun_count(const Topology& topology, const std::map<NodeId, Superframe>& schedules,
                          std::span<const Transmission> medium_log);

}  // namespace hmacsim

#include "hmacsim/control_plane.hpp"

#include <algorithm>

namespace hmacsim {

SchedulerDaemon::SchedulerDaemon(Superframe superframe, std::vector<QueueKey> known_queues)
    : superframe_(std::move(superframe)), known_(std::move(known_queues)) {
    std::sort(known_.begin(), known_.end());
    known_.erase(std::unique(known_.begin(), known_.end()), known_.end());
}

std::vector<GateCommand> SchedulerDaemon::slot_tick(Micros local_time) {
    const SlotPosition pos = slot_at(superframe_, local_time);
    GateSet target = gate_set_for(superframe_, pos, known_);
    std::vector<GateCommand> commands;
    for (const auto& key : known_) {
        const bool was = requested_.paused.contains(key);
        const bool want = target.paused.contains(key);
        if (was != want) {
            commands.push_back(GateCommand{want ? GateAction::Pause : GateAction::Unpause, key, pos.index});
        }
    }
    requested_ = std::move(target);
    return commands;
}

ControlChannel::ControlChannel(EventQueue& events, ControlChannelParams params, Rng rng, Sink sink)
    : events_(events), params_(params), rng_(std::move(rng)), sink_(std::move(sink)) {}

Micros ControlChannel::deliver(const GateCommand& command) {
    Micros delay = params_.base_latency;
    if (params_.jitter > 0) delay += std::uniform_int_distribution<Micros>(0, params_.jitter)(rng_);
    const Micros at = std::max(events_.now() + delay, last_delivery_);
    last_delivery_ = at;
    if (at == events_.now() && in_transit_ == 0) {
        sink_(command);
        return at;
    }
    ++in_transit_;
    events_.schedule(
        at,
        [this, command] {
            --in_transit_;
            sink_(command);
        },
        EventTag{-1, "gate_apply"});
    return at;
}

NodeController::NodeController(EventQueue& events, DcfNetwork& mac, const Topology& topology, NodeId node,
                               Superframe superframe, std::vector<QueueKey> known_queues, Clock clock,
                               ControlChannelParams channel, std::uint64_t seed, std::vector<GateApplication>* gate_log)
    : events_(events),
      mac_(mac),
      topology_(topology),
      node_(node),
      clock_(clock),
      daemon_(std::move(superframe), std::move(known_queues)),
      channel_(events, channel, make_substream(seed, node.value, Stream::Control),
               [this](const GateCommand& c) { apply(c); }),
      gate_log_(gate_log) {}

void NodeController::install() {
    for (const auto& c : daemon_.slot_tick(clock_.local_time(events_.now()))) apply(c);
    schedule_next_tick();
}

void NodeController::tick() {
    for (const auto& c : daemon_.slot_tick(clock_.local_time(events_.now()))) channel_.deliver(c);
    schedule_next_tick();
}

void NodeController::schedule_next_tick() {
    const Micros local = clock_.local_time(events_.now());
    const Micros boundary = next_slot_boundary(daemon_.superframe(), local);
    events_.schedule(
        clock_.true_time_at(boundary), [this] { tick(); }, EventTag{node_.value, "slot_tick"});
}

void NodeController::apply(const GateCommand& command) {
    const auto dest = topology_.find_by_mac(command.key.dest);
    if (!dest) return;
    if (command.action == GateAction::Pause) {
        mac_.pause_queue(node_, *dest, command.key.tid);
    } else {
        mac_.unpause_queue(node_, *dest, command.key.tid);
    }
    if (gate_log_ != nullptr) gate_log_->push_back(GateApplication{events_.now(), node_, command});
}

std::vector<QueueKey> known_queues_of(const Topology& topology, std::span<const Link> links, NodeId node) {
    std::vector<QueueKey> keys;
    for (const auto& l : links) {
        if (l.src == node) keys.push_back(QueueKey{topology.node(l.dst).mac, l.tid});
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return keys;
}

bool violates_schedule(const Superframe& superframe, Micros start, const MacAddress& dest, std::uint8_t tid) {
    return !is_allowed_at(superframe, slot_at(superframe, start), dest, tid);
}

std::size_t overrun_count(const Topology& topology, const std::map<NodeId, Superframe>& schedules,
                          std::span<const Transmission> medium_log) {
    std::size_t count = 0;
    for (const auto& tx : medium_log) {
        if (tx.kind != FrameKind::Data) continue;
        auto it = schedules.find(tx.src);
        if (it == schedules.end()) continue;
        if (violates_schedule(it->second, tx.start, topology.node(tx.dst).mac, tx.tid)) ++count;
    }
    return count;
}

}  // namespace hmacsim

#include "hmacsim/dcf_mac.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace hmacsim {

std::vector<std::string> PhyParams::violations() const {
    std::vector<std::string> out;
    if (slot_time <= 0 || sifs <= 0 || difs <= 0 || ack_duration <= 0 || phy_preamble <= 0 || cw_min <= 0 ||
        cw_max <= 0 || retry_limit <= 0) {
        out.emplace_back("all PHY parameters must be positive");
    }
    if (difs != sifs + 2 * slot_time) out.emplace_back("difs must equal sifs + 2 * slot_time");
    if (cw_min >= cw_max) out.emplace_back("cw_min must be below cw_max");
    return out;
}

int contention_window(int retries, const PhyParams& phy) {
    // 2^retries * (cw_min + 1) - 1, saturating well before overflow.
    std::int64_t cw = phy.cw_min + 1;
    for (int i = 0; i < retries && cw <= phy.cw_max; ++i) cw *= 2;
    return static_cast<int>(std::min<std::int64_t>(cw - 1, phy.cw_max));
}

int draw_backoff(Rng& rng, int retries, const PhyParams& phy) {
    std::uniform_int_distribution<int> dist(0, contention_window(retries, phy));
    return dist(rng);
}

Micros tx_duration(std::int64_t payload_bits, std::int64_t phy_rate_bps, const PhyParams& phy) {
    if (payload_bits <= 0) throw std::invalid_argument("payload_bits must be positive");
    if (phy_rate_bps <= 0) throw std::invalid_argument("phy_rate must be positive");
    const std::int64_t scaled = payload_bits * kMicrosPerSecond;
    return phy.phy_preamble + (scaled + phy_rate_bps - 1) / phy_rate_bps;
}

Outcome resolve_reception(const Topology& topology, std::span<const Transmission> medium, NodeId receiver,
                          const Transmission& tx) {
    if (!topology.interferes(tx.src, receiver)) return Outcome::Corrupted;
    for (const auto& other : medium) {
        if (other.id == tx.id) continue;
        const Micros overlap = std::min(other.end, tx.end) - std::max(other.start, tx.start);
        if (overlap < 1) continue;
        if (other.src == receiver || topology.interferes(other.src, receiver)) return Outcome::Corrupted;
    }
    return Outcome::Delivered;
}

DcfNetwork::DcfNetwork(EventQueue& events, const Topology& topology, std::vector<Link> links, MacOptions options,
                       std::uint64_t seed)
    : events_(events), topology_(topology), links_(std::move(links)), options_(std::move(options)) {
    if (auto v = options_.phy.violations(); !v.empty()) throw std::invalid_argument("PhyParams: " + v.front());

    stations_.reserve(topology_.size());
    for (const auto& node : topology_.nodes()) {
        Station st;
        st.id = node.id;
        st.rng = make_substream(seed, node.id.value, Stream::Backoff);
        for (const auto& other : topology_.nodes()) {
            if (other.id != node.id && topology_.senses(node.id, other.id)) st.hearers.push_back(other.id);
        }
        stations_.push_back(std::move(st));
    }
    for (const auto& link : links_) {
        if (!topology_.contains(link.src) || !topology_.contains(link.dst)) {
            throw TopologyError("link references unknown node");
        }
        station(link.src).queues[{link.dst, link.tid}];
    }
    stats_.resize(links_.size());
    next_seq_.assign(links_.size(), 0);
    last_delivered_seq_.resize(links_.size());
}

std::optional<std::size_t> DcfNetwork::link_index(NodeId src, NodeId dst, std::uint8_t tid) const {
    for (std::size_t i = 0; i < links_.size(); ++i) {
        if (links_[i].src == src && links_[i].dst == dst && links_[i].tid == tid) return i;
    }
    return std::nullopt;
}

std::size_t DcfNetwork::link_of(const Frame& f) const {
    auto idx = link_index(f.src, f.dst, f.tid);
    if (!idx) throw std::invalid_argument("frame does not belong to a configured link");
    return *idx;
}

EnqueueResult DcfNetwork::enqueue(Frame frame) {
    const std::size_t link = link_of(frame);
    if (frame.payload_bits <= 0) throw std::invalid_argument("payload_bits must be positive");
    Station& st = station(frame.src);
    LinkQueue& q = st.queues[{frame.dst, frame.tid}];
    if (q.fifo.size() >= options_.queue_capacity) {
        ++stats_[link].capacity_drops;
        return EnqueueResult::Dropped;
    }
    frame.seq = next_seq_[link]++;
    frame.retries = 0;
    q.fifo.push_back(frame);
    ++stats_[link].enqueued;
    if (!q.paused) start_contention(st);
    return EnqueueResult::Accepted;
}

EnqueueResult DcfNetwork::enqueue_on(std::size_t link_index, std::int64_t payload_bits) {
    const Link& l = links_.at(link_index);
    return enqueue(Frame{l.src, l.dst, l.tid, payload_bits});
}

void DcfNetwork::pause_queue(NodeId node, NodeId dest, std::uint8_t tid) {
    Station& st = station(node);
    const QueueId key{dest, tid};
    st.queues[key].paused = true;
    if (st.current && QueueId{st.current->dst, st.current->tid} == key &&
        (st.phase == TxPhase::Deferring || st.phase == TxPhase::Backoff)) {
        cancel_timer(st);
        requeue_current(st);
        st.phase = TxPhase::Idle;
        start_contention(st);
    }
}

void DcfNetwork::unpause_queue(NodeId node, NodeId dest, std::uint8_t tid) {
    Station& st = station(node);
    st.queues[{dest, tid}].paused = false;
    start_contention(st);
}

bool DcfNetwork::is_paused(NodeId node, NodeId dest, std::uint8_t tid) const {
    const auto& queues = stations_.at(node.value).queues;
    auto it = queues.find({dest, tid});
    return it != queues.end() && it->second.paused;
}

std::size_t DcfNetwork::queued(NodeId node, NodeId dest, std::uint8_t tid) const {
    const auto& queues = stations_.at(node.value).queues;
    auto it = queues.find({dest, tid});
    return it == queues.end() ? 0 : it->second.fifo.size();
}

std::size_t DcfNetwork::in_flight(std::size_t link_index) const {
    const Link& l = links_.at(link_index);
    const Station& st = stations_.at(l.src.value);
    return st.current && st.current->dst == l.dst && st.current->tid == l.tid ? 1 : 0;
}

void DcfNetwork::emit_noise(NodeId from, Micros duration) {
    if (duration <= 0) throw std::invalid_argument("noise duration must be positive");
    const Micros now = events_.now();
    const Transmission tx =
        begin_tx(Transmission{0, now, now + duration, from, from, FrameKind::Noise, 0, 0, 0, Outcome::Pending});
    events_.schedule(
        tx.end,
        [this, tx] {
            for (NodeId n : station(tx.src).hearers) {
                Station& h = station(n);
                if (--h.sensed == 0) on_idle(h);
            }
        },
        EventTag{from.value, "noise_end"});
}

void DcfNetwork::cancel_timer(Station& st) {
    if (st.timer) events_.cancel(*st.timer);
    st.timer.reset();
}

void DcfNetwork::requeue_current(Station& st) {
    st.queues[{st.current->dst, st.current->tid}].fifo.push_front(*st.current);
    st.current.reset();
}

void DcfNetwork::start_contention(Station& st) {
    if (st.phase != TxPhase::Idle || st.queues.empty()) return;

    // Round robin: first eligible queue strictly after the last one served, wrapping around.
    auto begin = st.last_served ? st.queues.upper_bound(*st.last_served) : st.queues.begin();
    auto it = begin;
    for (std::size_t n = 0; n < st.queues.size(); ++n) {
        if (it == st.queues.end()) it = st.queues.begin();
        if (!it->second.paused && !it->second.fifo.empty()) break;
        ++it;
    }
    if (it == st.queues.end()) it = st.queues.begin();
    if (it->second.paused || it->second.fifo.empty()) return;

    st.current = it->second.fifo.front();
    it->second.fifo.pop_front();
    st.last_served = it->first;
    st.backoff = draw_backoff(st.rng, st.current->retries, options_.phy);
    st.phase = TxPhase::Deferring;
    resume_access(st);
}

void DcfNetwork::resume_access(Station& st) {
    st.phase = TxPhase::Deferring;
    if (st.sensed > 0) return;
    st.access_start = events_.now() + options_.phy.difs;
    st.expiry = st.access_start + st.backoff * options_.phy.slot_time;
    st.phase = TxPhase::Backoff;
    st.timer = events_.schedule(
        st.expiry, [this, &st] { access_granted(st); }, EventTag{st.id.value, "access"});
}

void DcfNetwork::on_busy(Station& st) {
    if (st.phase != TxPhase::Backoff) return;
    const Micros now = events_.now();
    // A timer expiring this very microsecond still fires.
    if (st.expiry <= now) return;
    if (now > st.access_start) {
        st.backoff -= static_cast<int>((now - st.access_start) / options_.phy.slot_time);
    }
    cancel_timer(st);
    st.phase = TxPhase::Deferring;
}

void DcfNetwork::on_idle(Station& st) {
    if (st.phase == TxPhase::Deferring && st.current) resume_access(st);
}

const Transmission& DcfNetwork::begin_tx(Transmission tx) {
    tx.id = next_tx_id_++;
    max_duration_ = std::max(max_duration_, tx.end - tx.start);
    if (window_.size() > 64) {
        const Micros horizon = events_.now() - max_duration_;
        std::erase_if(window_, [horizon](const Transmission& t) { return t.end <= horizon; });
    }
    window_.push_back(tx);
    if (options_.record_medium_log) log_.push_back(tx);
    for (NodeId n : station(tx.src).hearers) {
        Station& h = station(n);
        if (h.sensed++ == 0) on_busy(h);
    }
    return window_.back();
}

Outcome DcfNetwork::end_tx(const Transmission& tx, NodeId receiver) {
    for (NodeId n : station(tx.src).hearers) {
        Station& h = station(n);
        if (--h.sensed == 0) on_idle(h);
    }
    const Outcome outcome = resolve_reception(topology_, window_, receiver, tx);
    if (options_.record_medium_log) log_[tx.id].outcome = outcome;
    return outcome;
}

void DcfNetwork::access_granted(Station& st) {
    st.timer.reset();
    st.phase = TxPhase::Transmitting;
    const Frame& f = *st.current;
    const std::size_t link = link_of(f);
    const Micros now = events_.now();
    const Micros duration = tx_duration(f.payload_bits, links_[link].phy_rate_bps, options_.phy);
    const Transmission tx = begin_tx(
        Transmission{0, now, now + duration, f.src, f.dst, FrameKind::Data, f.tid, f.seq, f.retries, Outcome::Pending});

    LinkStats& s = stats_[link];
    ++s.data_tx;
    if (f.retries > 0) ++s.retransmissions;
    s.airtime += duration;
    if (on_data_start) on_data_start(tx);

    events_.schedule(
        tx.end,
        [this, &st, tx, link] {
            const Outcome outcome = end_tx(tx, tx.dst);
            LinkStats& stats = stats_[link];
            if (outcome == Outcome::Delivered) {
                ++stats.data_rx_ok;
                auto& last = last_delivered_seq_[link];
                if (!last || tx.seq > *last) {
                    last = tx.seq;
                    ++stats.delivered_frames;
                    stats.delivered_bits += st.current->payload_bits;
                }
                events_.schedule_in(
                    options_.phy.sifs,
                    [this, tx, link, &st] {
                        ++stats_[link].ack_tx;
                        const Micros start = events_.now();
                        const Transmission ack = begin_tx(Transmission{0, start, start + options_.phy.ack_duration,
                                                                       tx.dst, tx.src, FrameKind::Ack, tx.tid, tx.seq,
                                                                       tx.retries, Outcome::Pending});
                        events_.schedule(
                            ack.end,
                            [this, ack, link, &st] {
                                const Outcome ack_outcome = end_tx(ack, ack.dst);
                                if (ack_outcome != Outcome::Delivered) {
                                    ++stats_[link].ack_collisions;
                                    return;
                                }
                                if (st.phase == TxPhase::AwaitingAck && st.current && st.current->seq == ack.seq &&
                                    st.current->dst == ack.src && st.current->tid == ack.tid) {
                                    cancel_timer(st);
                                    finish_exchange(st, true);
                                }
                            },
                            EventTag{ack.src.value, "ack_end"});
                    },
                    EventTag{tx.dst.value, "ack_start"});
            } else {
                ++stats.data_collisions;
            }
            st.phase = TxPhase::AwaitingAck;
            const Micros timeout = options_.phy.sifs + options_.phy.ack_duration + options_.phy.slot_time;
            st.timer = events_.schedule_in(
                timeout, [this, &st] { ack_timeout(st); }, EventTag{st.id.value, "ack_timeout"});
        },
        EventTag{st.id.value, "data_end"});
}

void DcfNetwork::finish_exchange(Station& st, bool acked) {
    const std::size_t link = link_of(*st.current);
    if (acked) {
        ++stats_[link].acked;
    } else {
        ++stats_[link].retry_drops;
    }
    st.current.reset();
    st.phase = TxPhase::Idle;
    if (on_frame_done) on_frame_done(link, acked);
    start_contention(st);
}

void DcfNetwork::ack_timeout(Station& st) {
    st.timer.reset();
    Frame& f = *st.current;
    ++f.retries;
    if (f.retries > options_.phy.retry_limit) {
        finish_exchange(st, false);
        return;
    }
    if (st.queues[{f.dst, f.tid}].paused) {
        requeue_current(st);
        st.phase = TxPhase::Idle;
        start_contention(st);
        return;
    }
    st.backoff = draw_backoff(st.rng, f.retries, options_.phy);
    resume_access(st);
}

}  // namespace hmacsim

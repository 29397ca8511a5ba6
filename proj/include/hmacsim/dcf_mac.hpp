#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hmacsim/sim_kernel.hpp"
#include "hmacsim/topology.hpp"

namespace hmacsim {

// 802.11 OFDM timing. Defaults follow the 9 us slot / 16 us SIFS family.
struct PhyParams {
    Micros slot_time = 9;
    Micros sifs = 16;
    Micros difs = 34;
    int cw_min = 15;
    int cw_max = 1023;
    Micros ack_duration = 44;
    Micros phy_preamble = 20;
    int retry_limit = 7;

    std::vector<std::string> violations() const;
};

// CW for the given retry count: min(2^retries * (cw_min + 1) - 1, cw_max).
int contention_window(int retries, const PhyParams& phy);
int draw_backoff(Rng& rng, int retries, const PhyParams& phy);

// phy_preamble + ceil(payload_bits / phy_rate) in microseconds. Throws std::invalid_argument on
// non-positive payload or rate.
Micros tx_duration(std::int64_t payload_bits, std::int64_t phy_rate_bps, const PhyParams& phy);

struct Frame {
    NodeId src;
    NodeId dst;
    std::uint8_t tid = 0;
    std::int64_t payload_bits = 12000;
    std::uint64_t seq = 0;
    int retries = 0;
};

enum class FrameKind { Data, Ack, Noise };
enum class Outcome { Pending, Delivered, Corrupted };

struct Transmission {
    std::uint64_t id = 0;
    Micros start = 0;
    Micros end = 0;
    NodeId src;
    NodeId dst;
    FrameKind kind = FrameKind::Data;
    std::uint8_t tid = 0;
    std::uint64_t seq = 0;
    int retries = 0;
    Outcome outcome = Outcome::Pending;
};

// Binary interference, no capture: the reception of tx at receiver succeeds iff the receiver is in
// range of tx.src and no other transmission from an interfering node (or the receiver itself,
// which is half-duplex) overlaps the frame by at least one microsecond.
Outcome resolve_reception(const Topology& topology, std::span<const Transmission> medium, NodeId receiver,
                          const Transmission& tx);

enum class TxPhase { Idle, Deferring, Backoff, Transmitting, AwaitingAck };

enum class EnqueueResult { Accepted, Dropped };

struct LinkStats {
    std::uint64_t enqueued = 0;
    std::uint64_t capacity_drops = 0;
    std::uint64_t data_tx = 0;
    std::uint64_t data_rx_ok = 0;
    std::uint64_t data_collisions = 0;
    std::uint64_t ack_tx = 0;
    std::uint64_t ack_collisions = 0;
    std::uint64_t retransmissions = 0;
    std::uint64_t acked = 0;
    std::uint64_t retry_drops = 0;
    std::uint64_t delivered_frames = 0;  // unique (src, dst, seq) received
    std::int64_t delivered_bits = 0;
    Micros airtime = 0;  // data airtime
};

struct MacOptions {
    PhyParams phy;
    std::size_t queue_capacity = 1000;
    bool record_medium_log = false;
};

// All stations of a topology sharing one medium. Each station runs a single DCF contention entity
// serving its unpaused per-(dest, TID) queues round robin.
class DcfNetwork {
public:
    DcfNetwork(EventQueue& events, const Topology& topology, std::vector<Link> links, MacOptions options,
               std::uint64_t seed);

    DcfNetwork(const DcfNetwork&) = delete;
    DcfNetwork& operator=(const DcfNetwork&) = delete;

    // Frame must belong to one of the configured links; seq is assigned here.
    EnqueueResult enqueue(Frame frame);
    EnqueueResult enqueue_on(std::size_t link_index, std::int64_t payload_bits);

    // Pausing a nonexistent queue creates it paused. Non-preemptive: an exchange already on the
    // air completes; a frame still contending is put back at the head of its queue.
    void pause_queue(NodeId node, NodeId dest, std::uint8_t tid);
    void unpause_queue(NodeId node, NodeId dest, std::uint8_t tid);
    bool is_paused(NodeId node, NodeId dest, std::uint8_t tid) const;

    // Puts an undecodable burst from `from` on the air starting now. It is carrier-sensed and
    // interferes like any other transmission.
    void emit_noise(NodeId from, Micros duration);

    TxPhase phase(NodeId node) const { return stations_.at(node.value).phase; }
    std::size_t queued(NodeId node, NodeId dest, std::uint8_t tid) const;
    std::size_t in_flight(std::size_t link_index) const;

    const std::vector<Link>& links() const { return links_; }
    std::optional<std::size_t> link_index(NodeId src, NodeId dst, std::uint8_t tid) const;
    const LinkStats& stats(std::size_t link_index) const { return stats_.at(link_index); }
    const std::vector<Transmission>& medium_log() const { return log_; }
    const PhyParams& phy() const { return options_.phy; }

    // Hooks: every data transmission start, and every frame leaving the MAC (acked or dropped).
    std::function<void(const Transmission&)> on_data_start;
    std::function<void(std::size_t link_index, bool acked)> on_frame_done;

private:
    using QueueId = std::pair<NodeId, std::uint8_t>;  // (dest, tid)

    struct LinkQueue {
        std::deque<Frame> fifo;
        bool paused = false;
    };

    struct Station {
        NodeId id;
        std::map<QueueId, LinkQueue> queues;
        std::optional<QueueId> last_served;
        TxPhase phase = TxPhase::Idle;
        std::optional<Frame> current;
        int backoff = 0;
        Micros access_start = 0;
        Micros expiry = 0;
        std::optional<EventHandle> timer;
        int sensed = 0;
        std::vector<NodeId> hearers;  // nodes whose carrier sense detects this station
        Rng rng;
    };

    Station& station(NodeId id) { return stations_.at(id.value); }
    void start_contention(Station& st);
    void resume_access(Station& st);
    void access_granted(Station& st);
    void finish_exchange(Station& st, bool acked);
    void ack_timeout(Station& st);
    void requeue_current(Station& st);
    void cancel_timer(Station& st);

    const Transmission& begin_tx(Transmission tx);
    Outcome end_tx(const Transmission& tx, NodeId receiver);
    void on_busy(Station& st);
    void on_idle(Station& st);
    std::size_t link_of(const Frame& f) const;

    EventQueue& events_;
    const Topology& topology_;
    std::vector<Link> links_;
    MacOptions options_;
    std::vector<Station> stations_;
    std::vector<LinkStats> stats_;
    std::vector<std::uint64_t> next_seq_;
    std::vector<std::optional<std::uint64_t>> last_delivered_seq_;
    std::vector<Transmission> window_;  // recent and ongoing transmissions, ordered by start
    std::vector<Transmission> log_;
    std::uint64_t next_tx_id_ = 0;
    Micros max_duration_ = 0;
};

}  // namespace hmacsim

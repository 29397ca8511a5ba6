#include "hmacsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

namespace hmacsim {

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::Dcf: return "dcf";
        case Mode::Tdma: return "tdma";
        case Mode::Hmac: return "hmac";
    }
    return "?";
}

Mode parse_mode(std::string_view text) {
    if (text == "dcf") return Mode::Dcf;
    if (text == "tdma") return Mode::Tdma;
    if (text == "hmac") return Mode::Hmac;
    throw std::invalid_argument("unknown mode: " + std::string(text));
}

Micros Scenario::duration() const { return std::llround(duration_s * static_cast<double>(kMicrosPerSecond)); }

std::vector<std::string> Scenario::violations() const {
    std::vector<std::string> out;
    if (!(duration_s > 0.0) || duration() <= 0) out.emplace_back("duration must be positive");
    if (payload_bytes <= 0) out.emplace_back("payload_bytes must be positive");
    for (const auto& v : validate(topology, links)) out.push_back(v.subject + ": " + v.message);
    for (const auto& v : phy.violations()) out.push_back("phy: " + v);
    if (traffic.size() > links.size()) out.emplace_back("more traffic specs than links");
    for (std::size_t i : paused_links) {
        if (i >= links.size()) out.emplace_back("paused link index out of range");
    }
    if (clocks.size() > topology.size()) out.emplace_back("more clocks than nodes");
    return out;
}

namespace {

struct ExampleBuilder {
    Scenario s;

    NodeId ap(const std::string& label) { return s.topology.add_node(label, Role::AP); }
    NodeId sta(const std::string& label, NodeId ap) {
        NodeId id = s.topology.add_node(label, Role::STA, ap);
        // Association: mutual range and carrier sensing between an AP and its STA.
        s.topology.set_senses(ap, id);
        s.topology.set_senses(id, ap);
        s.topology.set_interferes(ap, id);
        s.topology.set_interferes(id, ap);
        return id;
    }
    void mutual_sensing(NodeId a, NodeId b) {
        s.topology.set_senses(a, b);
        s.topology.set_senses(b, a);
        s.topology.set_interferes(a, b);
        s.topology.set_interferes(b, a);
    }
    void link(NodeId src, NodeId dst) { s.links.push_back(Link{src, dst, 6'000'000, 0}); }
};

}  // namespace

Scenario build_example(int n) {
    ExampleBuilder b;
    switch (n) {
        case 1: {
            b.s.name = "example1";
            const NodeId ap1 = b.ap("AP1");
            const NodeId ap2 = b.ap("AP2");
            const NodeId sta1 = b.sta("STA1", ap2);
            const NodeId sta2 = b.sta("STA2", ap1);
            const NodeId sta3 = b.sta("STA3", ap1);
            // AP1 and AP2 cannot sense each other, but AP2 reaches STA2.
            b.s.topology.set_interferes(ap2, sta2);
            b.link(ap1, sta2);
            b.link(ap1, sta3);
            b.link(ap2, sta1);
            b.s.notes.emplace_back("APs are hidden from each other; AP2 interferes at STA2 only");
            break;
        }
        case 2: {
            b.s.name = "example2";
            const NodeId ap1 = b.ap("AP1");
            const NodeId ap2 = b.ap("AP2");
            const NodeId sta1 = b.sta("STA1", ap2);
            const NodeId sta2 = b.sta("STA2", ap1);
            const NodeId sta3 = b.sta("STA3", ap1);
            const NodeId sta4 = b.sta("STA4", ap1);
            b.mutual_sensing(ap1, ap2);
            // ACK coupling between the two neighbouring receivers.
            b.s.topology.set_interferes(sta1, sta2);
            b.s.topology.set_interferes(sta2, sta1);
            b.link(ap1, sta2);
            b.link(ap2, sta1);
            b.link(ap1, sta3);
            b.link(ap1, sta4);
            b.s.notes.emplace_back(
                "assumption: STA3 and STA4 are not interference-coupled to STA1 or STA2 (not stated by the source)");
            break;
        }
        case 3: {
            b.s.name = "example3";
            const NodeId ap1 = b.ap("AP1");
            const NodeId ap2 = b.ap("AP2");
            const NodeId sta1 = b.sta("STA1", ap2);
            const NodeId sta2 = b.sta("STA2", ap1);
            const NodeId sta3 = b.sta("STA3", ap1);
            const NodeId sta4 = b.sta("STA4", ap1);
            // Per-link power control: AP1's high-power signal is heard at AP2, AP2's reduced-power
            // signal is not heard at AP1 but still reaches STA2.
            b.s.topology.set_senses(ap1, ap2);
            b.s.topology.set_interferes(ap1, ap2);
            b.s.topology.set_interferes(ap2, sta2);
            b.link(ap1, sta2);
            b.link(ap1, sta3);
            b.link(ap1, sta4);
            b.link(ap2, sta1);
            b.s.notes.emplace_back("asymmetric relations encode per-link transmit power control");
            break;
        }
        default:
            throw std::invalid_argument("example must be 1, 2 or 3, got " + std::to_string(n));
    }
    b.s.traffic.assign(b.s.links.size(), TrafficSpec{});
    return b.s;
}

Scenario build_gated_ap_scenario() {
    Scenario s;
    s.name = "gated-ap";
    const NodeId ap = s.topology.add_node("AP", Role::AP);
    const NodeId sta = s.topology.add_node("STA", Role::STA, ap, MacAddress::parse("34:13:e8:24:77:be"));
    s.topology.set_senses(ap, sta);
    s.topology.set_senses(sta, ap);
    s.topology.set_interferes(ap, sta);
    s.topology.set_interferes(sta, ap);
    s.links.push_back(Link{ap, sta, 6'000'000, 0});
    s.traffic.assign(1, TrafficSpec{});
    s.mode = Mode::Hmac;

    Superframe sf(10, 20'000);
    for (std::size_t slot = 0; slot < sf.total_slots(); ++slot) {
        AccessPolicy policy;
        if (slot >= 1 && slot <= 4) {
            policy.add(s.topology.node(sta).mac, 0);
        } else {
            policy.disable_all();
        }
        sf = set_access_policy(std::move(sf), slot, std::move(policy));
    }
    s.schedule = std::map<NodeId, Superframe>{{ap, std::move(sf)}};
    return s;
}

namespace {

std::vector<NodeId> scheduled_aps(const Scenario& scenario) {
    std::set<NodeId> srcs;
    for (const auto& l : scenario.links) srcs.insert(l.src);
    return {srcs.begin(), srcs.end()};
}

}  // namespace

ScheduleSet schedules_for(const Scenario& scenario) {
    if (scenario.schedule) {
        ScheduleSet out;
        out.superframes = *scenario.schedule;
        return out;
    }
    const auto aps = scheduled_aps(scenario);
    const SuperframeParams& p = scenario.superframe;
    switch (scenario.mode) {
        case Mode::Dcf: return make_open_schedule(scenario.links, aps, p.total_slots, p.slot_duration);
        case Mode::Tdma:
            return make_per_node_schedule(scenario.topology, scenario.links, aps, p.total_slots, p.slots_per_group,
                                          p.guard_count, p.slot_duration);
        case Mode::Hmac:
            return make_per_link_schedule(scenario.topology, scenario.links,
                                          make_conflict_graph(scenario.topology, scenario.links), aps, p.total_slots,
                                          p.slots_per_group, p.guard_count, p.slot_duration,
                                          PerLinkOptions{p.unconflicted_use_guards});
    }
    throw std::logic_error("unreachable");
}

RunResult run_detailed(const Scenario& scenario, const RunOptions& options) {
    if (auto v = scenario.violations(); !v.empty()) throw std::invalid_argument("invalid scenario: " + v.front());

    RunResult result;
    ScheduleSet schedules = schedules_for(scenario);
    result.schedules = schedules.superframes;
    result.plan = schedules.plan;

    EventQueue events;
    events.set_trace(options.event_trace);
    DcfNetwork mac(events, scenario.topology, scenario.links,
                   MacOptions{scenario.phy, scenario.queue_capacity, options.record_medium_log}, scenario.seed);

    std::size_t overruns = 0;
    mac.on_data_start = [&](const Transmission& tx) {
        auto it = result.schedules.find(tx.src);
        if (it != result.schedules.end() &&
            violates_schedule(it->second, tx.start, scenario.topology.node(tx.dst).mac, tx.tid)) {
            ++overruns;
        }
    };

    std::vector<std::unique_ptr<NodeController>> controllers;
    for (const auto& [node, superframe] : result.schedules) {
        std::vector<QueueKey> known;
        for (std::size_t i = 0; i < scenario.links.size(); ++i) {
            const Link& l = scenario.links[i];
            if (l.src == node && !scenario.paused_links.contains(i)) {
                known.push_back(QueueKey{scenario.topology.node(l.dst).mac, l.tid});
            }
        }
        const Clock clock = node.value < scenario.clocks.size() ? scenario.clocks[node.value] : Clock{};
        controllers.push_back(std::make_unique<NodeController>(
            events, mac, scenario.topology, node, superframe, std::move(known), clock, scenario.control,
            scenario.seed, options.record_gate_log ? &result.gate_log : nullptr));
    }
    for (auto& c : controllers) c->install();
    for (std::size_t i : scenario.paused_links) {
        const Link& l = scenario.links[i];
        mac.pause_queue(l.src, l.dst, l.tid);
    }

    const std::int64_t payload_bits = scenario.payload_bytes * 8;
    auto spec_of = [&](std::size_t i) { return i < scenario.traffic.size() ? scenario.traffic[i] : TrafficSpec{}; };

    mac.on_frame_done = [&](std::size_t link, bool) {
        if (spec_of(link).kind == TrafficSpec::Kind::Saturated) mac.enqueue_on(link, payload_bits);
    };

    std::vector<Rng> traffic_rngs;
    traffic_rngs.reserve(scenario.links.size());
    for (std::size_t i = 0; i < scenario.links.size(); ++i) {
        traffic_rngs.push_back(make_substream(scenario.seed, static_cast<std::uint32_t>(0x10000 + i), Stream::Traffic));
    }
    std::function<void(std::size_t)> poisson_arrival = [&](std::size_t link) {
        mac.enqueue_on(link, payload_bits);
        std::exponential_distribution<double> gap(spec_of(link).rate_fps);
        const auto delay = static_cast<Micros>(std::ceil(gap(traffic_rngs[link]) * 1e6));
        events.schedule_in(
            std::max<Micros>(delay, 1), [&, link] { poisson_arrival(link); },
            EventTag{scenario.links[link].src.value, "arrival"});
    };

    for (std::size_t i = 0; i < scenario.links.size(); ++i) {
        const TrafficSpec spec = spec_of(i);
        if (spec.kind == TrafficSpec::Kind::Saturated) {
            // Saturated links hold two frames: one in flight, one queued.
            mac.enqueue_on(i, payload_bits);
            mac.enqueue_on(i, payload_bits);
        } else if (spec.kind == TrafficSpec::Kind::Poisson && spec.rate_fps > 0.0) {
            std::exponential_distribution<double> gap(spec.rate_fps);
            const auto first = static_cast<Micros>(std::ceil(gap(traffic_rngs[i]) * 1e6));
            events.schedule(
                first, [&, i] { poisson_arrival(i); }, EventTag{scenario.links[i].src.value, "arrival"});
        }
    }

    const Micros end = scenario.duration();
    events.run_until(end);

    Metrics& m = result.metrics;
    for (std::size_t i = 0; i < scenario.links.size(); ++i) {
        const LinkStats& s = mac.stats(i);
        const Link& l = scenario.links[i];
        const std::size_t queued = mac.queued(l.src, l.dst, l.tid);
        if (s.enqueued != s.acked + s.retry_drops + queued + mac.in_flight(i)) {
            throw SimError("frame conservation violated on " + link_label(scenario.topology, l));
        }
        LinkMetrics lm;
        lm.link = link_label(scenario.topology, l);
        lm.delivered_bits = s.delivered_bits;
        lm.goodput_bps = static_cast<double>(s.delivered_bits) / scenario.duration_s;
        lm.data_tx = s.data_tx;
        lm.data_rx_ok = s.data_rx_ok;
        lm.data_collisions = s.data_collisions;
        lm.ack_collisions = s.ack_collisions;
        lm.retransmissions = s.retransmissions;
        lm.drops = s.retry_drops + s.capacity_drops;
        lm.airtime_fraction = static_cast<double>(s.airtime) / static_cast<double>(end);
        m.total_goodput_bps += lm.goodput_bps;
        m.links.push_back(std::move(lm));
    }
    m.overrun_count = overruns;
    if (options.record_medium_log) result.medium_log = mac.medium_log();
    return result;
}

Metrics run(const Scenario& scenario) { return run_detailed(scenario).metrics; }

double isolated_baseline(const Scenario& scenario, std::size_t link_index) {
    if (link_index >= scenario.links.size()) throw std::out_of_range("link index out of range");
    Scenario alone = scenario;
    alone.mode = Mode::Dcf;
    alone.schedule.reset();
    alone.traffic.assign(alone.links.size(), TrafficSpec{TrafficSpec::Kind::Off});
    alone.traffic[link_index] = TrafficSpec{TrafficSpec::Kind::Saturated};
    return run(alone).links[link_index].goodput_bps;
}

std::pair<double, double> pairwise_delivery_ratios(const Scenario& scenario, std::size_t a, std::size_t b,
                                                   double duration_s) {
    Scenario pair = scenario;
    pair.links = {scenario.links.at(a), scenario.links.at(b)};
    pair.traffic.assign(2, TrafficSpec{});
    pair.mode = Mode::Dcf;
    pair.schedule.reset();
    pair.paused_links.clear();
    pair.duration_s = duration_s;
    const Metrics m = run(pair);
    return {m.links[0].delivery_ratio(), m.links[1].delivery_ratio()};
}

double mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double standard_error(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double mu = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - mu) * (x - mu);
    const double n = static_cast<double>(xs.size());
    return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

const ReportRow& Report::row(std::string_view mode, std::string_view link) const {
    for (const auto& r : rows) {
        if (r.mode == mode && r.link == link) return r;
    }
    throw std::out_of_range("no report row for " + std::string(mode) + "/" + std::string(link));
}

Report run_matrix(const Scenario& scenario, const std::vector<Mode>& modes, const std::vector<std::uint64_t>& seeds,
                  unsigned threads) {
    if (modes.empty()) throw std::invalid_argument("run_matrix needs at least one mode");
    if (seeds.empty()) throw std::invalid_argument("run_matrix needs at least one seed");

    const std::size_t cells = modes.size() * seeds.size();
    std::vector<Metrics> results(cells);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t c = next++; c < cells; c = next++) {
            try {
                Scenario cell = scenario;
                cell.mode = modes[c / seeds.size()];
                cell.seed = seeds[c % seeds.size()];
                results[c] = run(cell);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cells)));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    Report report;
    for (std::size_t mi = 0; mi < modes.size(); ++mi) {
        const std::string mode = to_string(modes[mi]);
        ReportRow total{mode, "total"};
        std::vector<double> totals(seeds.size(), 0.0);
        for (std::size_t li = 0; li < scenario.links.size(); ++li) {
            std::vector<double> goodput, collisions, retx, airtime;
            for (std::size_t si = 0; si < seeds.size(); ++si) {
                const LinkMetrics& lm = results[mi * seeds.size() + si].links[li];
                goodput.push_back(lm.goodput_bps);
                collisions.push_back(static_cast<double>(lm.data_collisions));
                retx.push_back(static_cast<double>(lm.retransmissions));
                airtime.push_back(lm.airtime_fraction);
                totals[si] += lm.goodput_bps;
            }
            ReportRow row{mode,         link_label(scenario.topology, scenario.links[li]),
                          mean(goodput), standard_error(goodput),
                          mean(collisions), mean(retx),
                          mean(airtime)};
            total.goodput_bps_mean += row.goodput_bps_mean;
            total.data_collisions += row.data_collisions;
            total.retransmissions += row.retransmissions;
            total.airtime_fraction += row.airtime_fraction;
            report.rows.push_back(std::move(row));
        }
        total.goodput_bps_stderr = standard_error(totals);
        report.rows.push_back(std::move(total));
    }
    return report;
}

}  // namespace hmacsim

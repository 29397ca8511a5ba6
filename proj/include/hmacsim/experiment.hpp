#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hmacsim/control_plane.hpp"
#include "hmacsim/dcf_mac.hpp"
#include "hmacsim/interference_manager.hpp"
#include "hmacsim/schedule.hpp"
#include "hmacsim/topology.hpp"

namespace hmacsim {

enum class Mode { Dcf, Tdma, Hmac };

std::string to_string(Mode mode);
Mode parse_mode(std::string_view text);

struct TrafficSpec {
    enum class Kind { Saturated, Poisson, Off };
    Kind kind = Kind::Saturated;
    double rate_fps = 0.0;  // Poisson arrival rate, frames per second
};

struct SuperframeParams {
    std::size_t total_slots = 10;
    Micros slot_duration = 20'000;
    std::size_t slots_per_group = 4;
    std::size_t guard_count = 2;
    bool unconflicted_use_guards = true;
};

struct Scenario {
    std::string name;
    Topology topology;
    std::vector<Link> links;
    std::vector<TrafficSpec> traffic;  // one per link; missing entries are saturated
    Mode mode = Mode::Dcf;
    SuperframeParams superframe;
    ControlChannelParams control;
    std::vector<Clock> clocks;  // indexed by node id; missing entries are ideal
    double duration_s = 30.0;
    std::uint64_t seed = 1;
    PhyParams phy;
    std::int64_t payload_bytes = 1500;
    std::size_t queue_capacity = 1000;
    std::set<std::size_t> paused_links;  // held paused for the whole run
    std::optional<std::map<NodeId, Superframe>> schedule;  // overrides the mode's synthesized schedule
    std::vector<std::string> notes;

    Micros duration() const;
    std::vector<std::string> violations() const;
};

Scenario build_example(int n);

// Single-AP configuration: a 10 x 20 ms superframe that opens best-effort traffic
// towards one STA in slots 1-4 only.
Scenario build_gated_ap_scenario();

struct LinkMetrics {
    std::string link;
    std::int64_t delivered_bits = 0;
    double goodput_bps = 0.0;
    std::uint64_t data_tx = 0;
    std::uint64_t data_rx_ok = 0;
    std::uint64_t data_collisions = 0;
    std::uint64_t ack_collisions = 0;
    std::uint64_t retransmissions = 0;
    std::uint64_t drops = 0;
    double airtime_fraction = 0.0;

    // Fraction of data transmissions received intact.
    double delivery_ratio() const { return data_tx == 0 ? 1.0 : static_cast<double>(data_rx_ok) / data_tx; }

    friend bool operator==(const LinkMetrics&, const LinkMetrics&) = default;
};

struct Metrics {
    std::vector<LinkMetrics> links;
    double total_goodput_bps = 0.0;
    std::size_t overrun_count = 0;

    friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct RunOptions {
    bool record_medium_log = false;
    bool record_gate_log = false;
    std::ostream* event_trace = nullptr;
};

struct RunResult {
    Metrics metrics;
    std::map<NodeId, Superframe> schedules;
    SlotPlan plan;
    std::vector<Transmission> medium_log;
    std::vector<GateApplication> gate_log;
};

// Schedules the scenario's mode would install, without simulating.
ScheduleSet schedules_for(const Scenario& scenario);

RunResult run_detailed(const Scenario& scenario, const RunOptions& options = {});
Metrics run(const Scenario& scenario);

// Goodput of one link with every other source silenced, under plain DCF.
double isolated_baseline(const Scenario& scenario, std::size_t link_index);

// Saturated co-simulation of exactly two links under plain DCF; returns both delivery ratios.
std::pair<double, double> pairwise_delivery_ratios(const Scenario& scenario, std::size_t a, std::size_t b,
                                                   double duration_s = 5.0);

struct ReportRow {
    std::string mode;
    std::string link;  // "total" for the per-mode totals row
    double goodput_bps_mean = 0.0;
    double goodput_bps_stderr = 0.0;
    double data_collisions = 0.0;  // means across seeds
    double retransmissions = 0.0;
    double airtime_fraction = 0.0;
};

struct Report {
    std::vector<ReportRow> rows;

    const ReportRow& row(std::string_view mode, std::string_view link) const;
};

// Every (mode, seed) cell is an independent simulation; `threads` > 1 runs cells concurrently.
Report run_matrix(const Scenario& scenario, const std::vector<Mode>& modes, const std::vector<std::uint64_t>& seeds,
                  unsigned threads = 1);

double mean(const std::vector<double>& xs);
double standard_error(const std::vector<double>& xs);

}  // namespace hmacsim

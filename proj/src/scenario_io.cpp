#include "hmacsim/scenario_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <ostream>

namespace hmacsim {

using nlohmann::json;

namespace {

std::string role_name(Role r) { return r == Role::AP ? "AP" : "STA"; }

Role parse_role(const std::string& s) {
    if (s == "AP") return Role::AP;
    if (s == "STA") return Role::STA;
    throw ConfigError("unknown node role: " + s);
}

json relation_to_json(const Topology& t, bool (Topology::*rel)(NodeId, NodeId) const) {
    json pairs = json::array();
    for (const auto& a : t.nodes()) {
        for (const auto& b : t.nodes()) {
            if ((t.*rel)(a.id, b.id)) pairs.push_back(json::array({a.label, b.label}));
        }
    }
    return pairs;
}

NodeId node_ref(const Topology& t, const json& j) {
    try {
        if (j.is_number_unsigned()) {
            NodeId id{j.get<std::uint32_t>()};
            t.node(id);
            return id;
        }
        return t.find(j.get<std::string>());
    } catch (const TopologyError& e) {
        throw ConfigError(e.what());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad node reference: ") + e.what());
    }
}

std::string traffic_name(TrafficSpec::Kind k) {
    switch (k) {
        case TrafficSpec::Kind::Saturated: return "saturated";
        case TrafficSpec::Kind::Poisson: return "poisson";
        case TrafficSpec::Kind::Off: return "off";
    }
    return "?";
}

TrafficSpec parse_traffic(const json& j) {
    const std::string kind = j.is_string() ? j.get<std::string>() : j.at("kind").get<std::string>();
    if (kind == "saturated") return {TrafficSpec::Kind::Saturated};
    if (kind == "off") return {TrafficSpec::Kind::Off};
    if (kind == "poisson") return {TrafficSpec::Kind::Poisson, j.at("rate_fps").get<double>()};
    throw ConfigError("unknown traffic kind: " + kind);
}

}  // namespace

json superframe_to_json(const Superframe& sf) {
    json slots = json::array();
    for (std::size_t i = 0; i < sf.total_slots(); ++i) {
        const AccessPolicy& p = sf.policy(i);
        json entries = json::array();
        for (const auto& e : p.entries()) entries.push_back({{"dest", e.dest.to_string()}, {"tos", e.tos}});
        slots.push_back({{"index", i}, {"entries", entries}, {"allow_all", p.allows_all()}});
    }
    return {{"total_slots", sf.total_slots()}, {"slot_duration_us", sf.slot_duration()}, {"slots", slots}};
}

Superframe superframe_from_json(const json& doc) {
    Superframe sf(doc.at("total_slots").get<std::size_t>(), doc.at("slot_duration_us").get<Micros>());
    for (const auto& slot : doc.value("slots", json::array())) {
        AccessPolicy p;
        if (slot.value("allow_all", false)) p.allow_all();
        for (const auto& e : slot.value("entries", json::array())) {
            p.add(MacAddress::parse(e.at("dest").get<std::string>()), e.at("tos").get<std::uint8_t>());
        }
        sf = set_access_policy(std::move(sf), slot.at("index").get<std::size_t>(), std::move(p));
    }
    return sf;
}

json schedules_to_json(const Topology& topology, const std::map<NodeId, Superframe>& schedules) {
    json out = json::array();
    for (const auto& [node, sf] : schedules) {
        json entry = superframe_to_json(sf);
        entry["node"] = topology.node(node).label;
        out.push_back(std::move(entry));
    }
    return out;
}

std::map<NodeId, Superframe> schedules_from_json(const Topology& topology, const json& doc) {
    std::map<NodeId, Superframe> out;
    for (const auto& entry : doc) out.insert_or_assign(node_ref(topology, entry.at("node")), superframe_from_json(entry));
    return out;
}

json scenario_to_json(const Scenario& s) {
    const Topology& t = s.topology;
    json nodes = json::array();
    for (const auto& n : t.nodes()) {
        json node = {{"label", n.label}, {"role", role_name(n.role)}, {"mac", n.mac.to_string()}};
        if (n.ap) node["ap"] = t.node(*n.ap).label;
        nodes.push_back(std::move(node));
    }
    json links = json::array();
    for (const auto& l : s.links) {
        links.push_back({{"src", t.node(l.src).label},
                         {"dst", t.node(l.dst).label},
                         {"phy_rate_bps", l.phy_rate_bps},
                         {"tid", l.tid}});
    }
    json traffic = json::array();
    for (std::size_t i = 0; i < s.links.size(); ++i) {
        const TrafficSpec spec = i < s.traffic.size() ? s.traffic[i] : TrafficSpec{};
        json j = {{"kind", traffic_name(spec.kind)}};
        if (spec.kind == TrafficSpec::Kind::Poisson) j["rate_fps"] = spec.rate_fps;
        traffic.push_back(std::move(j));
    }
    json offsets = json::array();
    json drifts = json::array();
    for (std::size_t i = 0; i < t.size(); ++i) {
        const Clock c = i < s.clocks.size() ? s.clocks[i] : Clock{};
        offsets.push_back(c.offset);
        drifts.push_back(c.drift_ppm);
    }
    json doc = {
        {"name", s.name},
        {"topology",
         {{"nodes", nodes},
          {"senses", relation_to_json(t, &Topology::senses)},
          {"interferes", relation_to_json(t, &Topology::interferes)}}},
        {"links", links},
        {"traffic", traffic},
        {"payload_bytes", s.payload_bytes},
        {"queue_capacity", s.queue_capacity},
        {"mode", to_string(s.mode)},
        {"superframe",
         {{"total_slots", s.superframe.total_slots},
          {"slot_duration_us", s.superframe.slot_duration},
          {"slots_per_group", s.superframe.slots_per_group},
          {"guard_count", s.superframe.guard_count},
          {"unconflicted_use_guards", s.superframe.unconflicted_use_guards}}},
        {"control", {{"base_latency_us", s.control.base_latency}, {"jitter_us", s.control.jitter}}},
        {"clocks", {{"offset_us", offsets}, {"drift_ppm", drifts}}},
        {"phy",
         {{"slot_time_us", s.phy.slot_time},
          {"sifs_us", s.phy.sifs},
          {"difs_us", s.phy.difs},
          {"cw_min", s.phy.cw_min},
          {"cw_max", s.phy.cw_max},
          {"ack_duration_us", s.phy.ack_duration},
          {"phy_preamble_us", s.phy.phy_preamble},
          {"retry_limit", s.phy.retry_limit}}},
        {"duration_s", s.duration_s},
        {"seed", s.seed},
        {"notes", s.notes},
    };
    if (!s.paused_links.empty()) doc["paused_links"] = s.paused_links;
    if (s.schedule) doc["schedule"] = schedules_to_json(t, *s.schedule);
    return doc;
}

Scenario scenario_from_json(const json& doc) {
    try {
        Scenario s;
        s.name = doc.value("name", "");
        const json& topo = doc.at("topology");
        std::vector<std::pair<std::string, std::string>> associations;
        for (const auto& n : topo.at("nodes")) {
            std::optional<MacAddress> mac;
            if (n.contains("mac")) mac = MacAddress::parse(n.at("mac").get<std::string>());
            s.topology.add_node(n.at("label").get<std::string>(), parse_role(n.value("role", "STA")), std::nullopt,
                                mac);
            if (n.contains("ap")) associations.emplace_back(n.at("label"), n.at("ap"));
        }
        // Second pass so associations may reference nodes declared later.
        Topology rebuilt;
        for (const auto& n : s.topology.nodes()) {
            std::optional<NodeId> ap;
            for (const auto& [sta, a] : associations) {
                if (sta == n.label) ap = node_ref(s.topology, a);
            }
            rebuilt.add_node(n.label, n.role, ap, n.mac);
        }
        s.topology = std::move(rebuilt);
        for (const auto& p : topo.value("senses", json::array())) {
            s.topology.set_senses(node_ref(s.topology, p.at(0)), node_ref(s.topology, p.at(1)));
        }
        for (const auto& p : topo.value("interferes", json::array())) {
            s.topology.set_interferes(node_ref(s.topology, p.at(0)), node_ref(s.topology, p.at(1)));
        }

        for (const auto& l : doc.at("links")) {
            s.links.push_back(Link{node_ref(s.topology, l.at("src")), node_ref(s.topology, l.at("dst")),
                                   l.value("phy_rate_bps", std::int64_t{6'000'000}), l.value("tid", std::uint8_t{0})});
        }
        if (doc.contains("traffic")) {
            const json& tr = doc.at("traffic");
            if (tr.is_array()) {
                for (const auto& t : tr) s.traffic.push_back(parse_traffic(t));
            } else {
                s.traffic.assign(s.links.size(), parse_traffic(tr));
            }
        } else {
            s.traffic.assign(s.links.size(), TrafficSpec{});
        }
        s.payload_bytes = doc.value("payload_bytes", s.payload_bytes);
        s.queue_capacity = doc.value("queue_capacity", s.queue_capacity);
        s.mode = parse_mode(doc.value("mode", std::string("dcf")));

        if (doc.contains("superframe")) {
            const json& sf = doc.at("superframe");
            s.superframe.total_slots = sf.value("total_slots", s.superframe.total_slots);
            s.superframe.slot_duration = sf.value("slot_duration_us", s.superframe.slot_duration);
            s.superframe.slots_per_group = sf.value("slots_per_group", s.superframe.slots_per_group);
            s.superframe.guard_count = sf.value("guard_count", s.superframe.guard_count);
            s.superframe.unconflicted_use_guards =
                sf.value("unconflicted_use_guards", s.superframe.unconflicted_use_guards);
        }
        if (doc.contains("control")) {
            s.control.base_latency = doc.at("control").value("base_latency_us", Micros{0});
            s.control.jitter = doc.at("control").value("jitter_us", Micros{0});
        }
        if (doc.contains("clocks")) {
            const json& c = doc.at("clocks");
            const auto offsets = c.value("offset_us", std::vector<Micros>{});
            const auto drifts = c.value("drift_ppm", std::vector<double>{});
            s.clocks.resize(std::max(offsets.size(), drifts.size()));
            for (std::size_t i = 0; i < offsets.size(); ++i) s.clocks[i].offset = offsets[i];
            for (std::size_t i = 0; i < drifts.size(); ++i) s.clocks[i].drift_ppm = drifts[i];
        }
        if (doc.contains("phy")) {
            const json& p = doc.at("phy");
            s.phy.slot_time = p.value("slot_time_us", s.phy.slot_time);
            s.phy.sifs = p.value("sifs_us", s.phy.sifs);
            s.phy.difs = p.value("difs_us", s.phy.difs);
            s.phy.cw_min = p.value("cw_min", s.phy.cw_min);
            s.phy.cw_max = p.value("cw_max", s.phy.cw_max);
            s.phy.ack_duration = p.value("ack_duration_us", s.phy.ack_duration);
            s.phy.phy_preamble = p.value("phy_preamble_us", s.phy.phy_preamble);
            s.phy.retry_limit = p.value("retry_limit", s.phy.retry_limit);
        }
        s.duration_s = doc.value("duration_s", s.duration_s);
        s.seed = doc.value("seed", s.seed);
        s.notes = doc.value("notes", std::vector<std::string>{});
        if (doc.contains("paused_links")) s.paused_links = doc.at("paused_links").get<std::set<std::size_t>>();
        if (doc.contains("schedule")) s.schedule = schedules_from_json(s.topology, doc.at("schedule"));
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed scenario: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("malformed scenario: ") + e.what());
    }
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return scenario_from_json(doc);
}

json metrics_to_json(const Metrics& m) {
    json links = json::array();
    for (const auto& l : m.links) {
        links.push_back({{"link", l.link},
                         {"delivered_bits", l.delivered_bits},
                         {"goodput_bps", l.goodput_bps},
                         {"data_tx", l.data_tx},
                         {"data_rx_ok", l.data_rx_ok},
                         {"data_collisions", l.data_collisions},
                         {"ack_collisions", l.ack_collisions},
                         {"retransmissions", l.retransmissions},
                         {"drops", l.drops},
                         {"airtime_fraction", l.airtime_fraction}});
    }
    return {{"links", links}, {"total_goodput_bps", m.total_goodput_bps}, {"overrun_count", m.overrun_count}};
}

std::string format_number(double value) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    (void)ec;
    return std::string(buf.data(), end);
}

void write_report_csv(std::ostream& out, const Report& report) {
    out << "mode,link,goodput_bps_mean,goodput_bps_stderr,data_collisions,retransmissions,airtime_fraction\n";
    for (const auto& r : report.rows) {
        out << r.mode << ',' << r.link << ',' << format_number(r.goodput_bps_mean) << ','
            << format_number(r.goodput_bps_stderr) << ',' << format_number(r.data_collisions) << ','
            << format_number(r.retransmissions) << ',' << format_number(r.airtime_fraction) << '\n';
    }
}

json report_to_json(const Report& report) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"mode", r.mode},
                        {"link", r.link},
                        {"goodput_bps_mean", r.goodput_bps_mean},
                        {"goodput_bps_stderr", r.goodput_bps_stderr},
                        {"data_collisions", r.data_collisions},
                        {"retransmissions", r.retransmissions},
                        {"airtime_fraction", r.airtime_fraction}});
    }
    return {{"rows", rows}};
}

void write_medium_log(std::ostream& out, const Topology& topology, std::span<const Transmission> log) {
    for (const auto& tx : log) {
        out << tx.start << ' ' << tx.end << ' ' << topology.node(tx.src).label << ' ' << topology.node(tx.dst).label
            << ' ' << (tx.kind == FrameKind::Data ? "data" : tx.kind == FrameKind::Ack ? "ack" : "noise") << ' '
            << (tx.outcome == Outcome::Delivered ? "delivered"
                                                 : tx.outcome == Outcome::Corrupted ? "corrupted" : "pending")
            << '\n';
    }
}

void write_gate_log(std::ostream& out, const Topology& topology, std::span<const GateApplication> log) {
    for (const auto& g : log) {
        out << g.applied_at << ' ' << topology.node(g.node).label << ' '
            << (g.command.action == GateAction::Pause ? "pause" : "unpause") << ' ' << g.command.key.dest.to_string()
            << '/' << static_cast<int>(g.command.key.tid) << ' ' << g.command.issued_at_slot << '\n';
    }
}

}  // namespace hmacsim

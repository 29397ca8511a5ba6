#include "hmacsim/topology.hpp"

#include <sstream>

namespace hmacsim {

NodeId Topology::add_node(std::string label, Role role, std::optional<NodeId> ap, std::optional<MacAddress> mac) {
    const NodeId id{static_cast<std::uint32_t>(nodes_.size())};
    nodes_.push_back(Node{id, std::move(label), role, ap, mac.value_or(MacAddress::for_node(id))});
    grow();
    return id;
}

void Topology::grow() {
    const std::size_t n = nodes_.size();
    std::vector<char> senses(n * n, 0);
    std::vector<char> interferes(n * n, 0);
    for (std::size_t a = 0; a + 1 < n; ++a) {
        for (std::size_t b = 0; b + 1 < n; ++b) {
            senses[a * n + b] = senses_[a * (n - 1) + b];
            interferes[a * n + b] = interferes_[a * (n - 1) + b];
        }
    }
    senses_ = std::move(senses);
    interferes_ = std::move(interferes);
}

std::size_t Topology::index(NodeId from, NodeId to) const {
    if (!contains(from) || !contains(to)) {
        throw TopologyError("unknown node id " + std::to_string(contains(from) ? to.value : from.value));
    }
    return from.value * nodes_.size() + to.value;
}

void Topology::set_senses(NodeId from, NodeId to, bool value) { senses_[index(from, to)] = value; }
void Topology::set_interferes(NodeId from, NodeId to, bool value) { interferes_[index(from, to)] = value; }
bool Topology::senses(NodeId from, NodeId to) const { return senses_[index(from, to)] != 0; }
bool Topology::interferes(NodeId from, NodeId to) const { return interferes_[index(from, to)] != 0; }

const Node& Topology::node(NodeId id) const {
    if (!contains(id)) throw TopologyError("unknown node id " + std::to_string(id.value));
    return nodes_[id.value];
}

NodeId Topology::find(std::string_view label) const {
    for (const auto& n : nodes_) {
        if (n.label == label) return n.id;
    }
    throw TopologyError("unknown node label " + std::string(label));
}

std::optional<NodeId> Topology::find_by_mac(const MacAddress& mac) const {
    for (const auto& n : nodes_) {
        if (n.mac == mac) return n.id;
    }
    return std::nullopt;
}

std::vector<NodeId> Topology::access_points() const {
    std::vector<NodeId> aps;
    for (const auto& n : nodes_) {
        if (n.role == Role::AP) aps.push_back(n.id);
    }
    return aps;
}

std::string link_label(const Topology& topology, const Link& link) {
    std::string label = topology.node(link.src).label + "->" + topology.node(link.dst).label;
    if (link.tid != 0) label += "/tid" + std::to_string(link.tid);
    return label;
}

namespace {

std::string pair_name(const Topology& t, NodeId a, NodeId b) {
    return "(" + t.node(a).label + "," + t.node(b).label + ")";
}

}  // namespace

std::vector<Violation> validate(const Topology& topology, std::span<const Link> links) {
    std::vector<Violation> out;
    const auto& nodes = topology.nodes();

    std::set<std::string> labels;
    std::set<MacAddress> macs;
    for (const auto& n : nodes) {
        if (!labels.insert(n.label).second) out.push_back({n.label, "duplicate node label"});
        if (!macs.insert(n.mac).second) out.push_back({n.label, "duplicate MAC address " + n.mac.to_string()});
        if (n.role == Role::STA) {
            if (!n.ap || !topology.contains(*n.ap) || topology.node(*n.ap).role != Role::AP) {
                out.push_back({n.label, "STA must be associated to exactly one AP"});
            }
        } else if (n.ap) {
            out.push_back({n.label, "AP cannot be associated to another AP"});
        }
    }

    for (const auto& a : nodes) {
        for (const auto& b : nodes) {
            const bool s = topology.senses(a.id, b.id);
            const bool i = topology.interferes(a.id, b.id);
            if (a.id == b.id) {
                if (s) out.push_back({pair_name(topology, a.id, b.id), "senses must be irreflexive"});
                if (i) out.push_back({pair_name(topology, a.id, b.id), "interferes must be irreflexive"});
            } else if (s && !i) {
                out.push_back({pair_name(topology, a.id, b.id), "senses holds but interferes does not"});
            }
        }
    }

    for (std::size_t k = 0; k < links.size(); ++k) {
        const Link& l = links[k];
        std::ostringstream subject;
        subject << "link[" << k << "]";
        if (!topology.contains(l.src) || !topology.contains(l.dst)) {
            out.push_back({subject.str(), "references unknown node"});
            continue;
        }
        const std::string name = subject.str() + " " + link_label(topology, l);
        if (l.tid > 7) out.push_back({name, "tid " + std::to_string(l.tid) + " outside [0,7]"});
        if (l.phy_rate_bps <= 0) out.push_back({name, "phy_rate must be positive"});
        if (l.src == l.dst) {
            out.push_back({name, "source equals destination"});
            continue;
        }
        if (!topology.interferes(l.src, l.dst)) out.push_back({name, "receiver out of transmitter range"});
        const Node& dst = topology.node(l.dst);
        if (dst.role == Role::STA && dst.ap && *dst.ap != l.src) {
            out.push_back({name, "downlink must originate at the receiver's AP"});
        }
        for (std::size_t j = 0; j < k; ++j) {
            if (links[j] == l) out.push_back({name, "duplicate link"});
        }
    }
    return out;
}

bool hidden_data_conflict(const Topology& topology, const Link& l1, const Link& l2) {
    // Validates ids even on the early-out path.
    const bool cross = topology.interferes(l2.src, l1.dst) || topology.interferes(l1.src, l2.dst);
    if (l1.src == l2.src) return false;
    return !topology.senses(l1.src, l2.src) && cross;
}

bool ack_conflict(const Topology& topology, const Link& l1, const Link& l2) {
    const bool coupled = topology.interferes(l2.dst, l1.dst) || topology.interferes(l1.dst, l2.dst);
    if (l1.dst == l2.dst) throw TopologyError("ack_conflict: links share receiver " + topology.node(l1.dst).label);
    if (l1.src == l2.src) return false;
    return coupled;
}

ConflictSet link_conflicts(const Topology& topology, std::span<const Link> links) {
    ConflictSet out;
    for (std::size_t a = 0; a < links.size(); ++a) {
        for (std::size_t b = a + 1; b < links.size(); ++b) {
            const Link& l1 = links[a];
            const Link& l2 = links[b];
            if (l1.src == l2.src) continue;
            if (hidden_data_conflict(topology, l1, l2) || hidden_data_conflict(topology, l2, l1) ||
                ack_conflict(topology, l1, l2)) {
                out.insert(LinkPair{a, b});
            }
        }
    }
    return out;
}

}  // namespace hmacsim

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hmacsim/types.hpp"

namespace hmacsim {

enum class Role { AP, STA };

struct Node {
    NodeId id;
    std::string label;
    Role role = Role::STA;
    std::optional<NodeId> ap;  // association, STAs only
    MacAddress mac;
};

// Thrown when an operation references a node the topology does not contain.
class TopologyError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Nodes plus two directed boolean relations. Both relations are read "signal of a at b":
//   senses(a, b)     - b's carrier sense detects a's transmissions (b defers to a)
//   interferes(a, b) - a transmission by a corrupts any concurrent reception at b
class Topology {
public:
    NodeId add_node(std::string label, Role role, std::optional<NodeId> ap = std::nullopt,
                    std::optional<MacAddress> mac = std::nullopt);

    void set_senses(NodeId from, NodeId to, bool value = true);
    void set_interferes(NodeId from, NodeId to, bool value = true);

    bool senses(NodeId from, NodeId to) const;
    bool interferes(NodeId from, NodeId to) const;

    std::size_t size() const { return nodes_.size(); }
    bool contains(NodeId id) const { return id.value < nodes_.size(); }
    const Node& node(NodeId id) const;
    const std::vector<Node>& nodes() const { return nodes_; }
    NodeId find(std::string_view label) const;
    std::optional<NodeId> find_by_mac(const MacAddress& mac) const;
    std::vector<NodeId> access_points() const;

private:
    std::size_t index(NodeId from, NodeId to) const;
    void grow();

    std::vector<Node> nodes_;
    std::vector<char> senses_;      // row-major size() x size()
    std::vector<char> interferes_;
};

struct Link {
    NodeId src;
    NodeId dst;
    std::int64_t phy_rate_bps = 6'000'000;
    std::uint8_t tid = 0;

    friend auto operator<=>(const Link&, const Link&) = default;
};

std::string link_label(const Topology& topology, const Link& link);

struct Violation {
    std::string subject;  // offending pair, node or link
    std::string message;
};

// Unordered pair of link indices, stored with first < second.
struct LinkPair {
    std::size_t first = 0;
    std::size_t second = 0;

    static LinkPair of(std::size_t a, std::size_t b) { return a < b ? LinkPair{a, b} : LinkPair{b, a}; }
    friend auto operator<=>(const LinkPair&, const LinkPair&) = default;
};

using ConflictSet = std::set<LinkPair>;

std::vector<Violation> validate(const Topology& topology, std::span<const Link> links);

// Transmitters cannot defer to each other and at least one receiver hears the other transmitter.
// Links sharing a transmitter never conflict.
bool hidden_data_conflict(const Topology& topology, const Link& l1, const Link& l2);

// A contention-free ACK from one receiver can corrupt data arriving at the other receiver.
// Throws TopologyError when both links share a receiver.
bool ack_conflict(const Topology& topology, const Link& l1, const Link& l2);

// Symmetric, irreflexive closure of the two predicates over all link pairs.
ConflictSet link_conflicts(const Topology& topology, std::span<const Link> links);

}  // namespace hmacsim

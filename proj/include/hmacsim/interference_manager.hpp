#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "hmacsim/schedule.hpp"
#include "hmacsim/topology.hpp"

namespace hmacsim {

// Vertices are link indices; edges are unordered conflicting pairs.
class ConflictGraph {
public:
    ConflictGraph(std::size_t vertex_count, const ConflictSet& edges);

    std::size_t vertex_count() const { return adjacency_.size(); }
    const ConflictSet& edges() const { return edges_; }
    const std::set<std::size_t>& neighbors(std::size_t v) const { return adjacency_.at(v); }
    std::size_t degree(std::size_t v) const { return adjacency_.at(v).size(); }
    bool adjacent(std::size_t a, std::size_t b) const { return adjacency_.at(a).contains(b); }

private:
    ConflictSet edges_;
    std::vector<std::set<std::size_t>> adjacency_;
};

ConflictGraph make_conflict_graph(const Topology& topology, std::span<const Link> links);

// Greedy colouring of the vertices that have at least one edge: highest degree first, ties by
// lower index. Unconflicted vertices get no colour.
std::vector<std::optional<std::size_t>> greedy_coloring(const ConflictGraph& graph);

struct SlotPlan {
    std::size_t total_slots = 0;
    Micros slot_duration = 0;
    std::set<std::size_t> guard_slots;
    std::vector<std::set<std::size_t>> permitted;  // per link index
    // Unconflicted links are also permitted in guard slots.
    bool unconflicted_use_guards = false;
};

struct ScheduleSet {
    SlotPlan plan;
    std::map<NodeId, Superframe> superframes;  // one per AP
};

struct PerLinkOptions {
    bool unconflicted_use_guards = true;
};

// Classical TDMA: each AP owns one contiguous block and all of its links share it.
ScheduleSet make_per_node_schedule(const Topology& topology, std::span<const Link> links, std::span<const NodeId> aps,
                                   std::size_t total_slots, std::size_t slots_per_ap, std::size_t guard_count,
                                   Micros slot_duration);

// Per-link TDMA: each colour class of the conflict graph owns one block. Unconflicted links get every
// slot, or every non-guard slot when unconflicted_use_guards is off.
ScheduleSet make_per_link_schedule(const Topology& topology, std::span<const Link> links, const ConflictGraph& graph,
                                   std::span<const NodeId> aps, std::size_t total_slots, std::size_t slots_per_group,
                                   std::size_t guard_count, Micros slot_duration, PerLinkOptions options = {});

// Every AP may transmit to anyone in every slot.
ScheduleSet make_open_schedule(std::span<const Link> links, std::span<const NodeId> aps, std::size_t total_slots,
                               Micros slot_duration);

std::vector<Violation> verify_plan(const ConflictGraph& graph, const SlotPlan& plan);

// Renders per-link permissions into one superframe per AP.
std::map<NodeId, Superframe> superframes_from_plan(const Topology& topology, std::span<const Link> links,
                                                   std::span<const NodeId> aps, const SlotPlan& plan);

}  // namespace hmacsim

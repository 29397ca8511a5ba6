#include "hmacsim/interference_manager.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace hmacsim {

ConflictGraph::ConflictGraph(std::size_t vertex_count, const ConflictSet& edges)
    : edges_(edges), adjacency_(vertex_count) {
    for (const auto& e : edges_) {
        if (e.first == e.second || e.second >= vertex_count) {
            throw std::invalid_argument("conflict graph edge out of range or self-loop");
        }
        adjacency_[e.first].insert(e.second);
        adjacency_[e.second].insert(e.first);
    }
}

ConflictGraph make_conflict_graph(const Topology& topology, std::span<const Link> links) {
    return ConflictGraph(links.size(), link_conflicts(topology, links));
}

std::vector<std::optional<std::size_t>> greedy_coloring(const ConflictGraph& graph) {
    std::vector<std::size_t> order(graph.vertex_count());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return graph.degree(a) > graph.degree(b); });

    std::vector<std::optional<std::size_t>> color(graph.vertex_count());
    for (std::size_t v : order) {
        if (graph.degree(v) == 0) continue;
        std::set<std::size_t> taken;
        for (std::size_t u : graph.neighbors(v)) {
            if (color[u]) taken.insert(*color[u]);
        }
        std::size_t c = 0;
        while (taken.contains(c)) ++c;
        color[v] = c;
    }
    return color;
}

namespace {

// Lays out `blocks` blocks of `block_size` slots, each followed by its round-robin share of the
// guards. Slots left over at the end become guards as well. With no blocks the guards sit at the end.
std::vector<std::set<std::size_t>> layout_blocks(std::size_t blocks, std::size_t block_size, std::size_t guard_count,
                                                 std::size_t total_slots, std::set<std::size_t>& guards) {
    if (blocks * block_size + guard_count > total_slots) {
        throw ScheduleError("schedule capacity exceeded: " + std::to_string(blocks) + " x " +
                            std::to_string(block_size) + " + " + std::to_string(guard_count) + " guards > " +
                            std::to_string(total_slots) + " slots");
    }
    std::vector<std::set<std::size_t>> out(blocks);
    if (blocks == 0) {
        for (std::size_t slot = total_slots - guard_count; slot < total_slots; ++slot) guards.insert(slot);
        return out;
    }
    std::size_t slot = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
        for (std::size_t k = 0; k < block_size; ++k) out[b].insert(slot++);
        const std::size_t share = guard_count / blocks + (b < guard_count % blocks ? 1 : 0);
        for (std::size_t k = 0; k < share; ++k) guards.insert(slot++);
    }
    for (; slot < total_slots; ++slot) guards.insert(slot);
    return out;
}

std::size_t ap_index(std::span<const NodeId> aps, NodeId node) {
    auto it = std::find(aps.begin(), aps.end(), node);
    if (it == aps.end()) throw ScheduleError("link source is not one of the scheduled APs");
    return static_cast<std::size_t>(it - aps.begin());
}

}  // namespace

std::map<NodeId, Superframe> superframes_from_plan(const Topology& topology, std::span<const Link> links,
                                                   std::span<const NodeId> aps, const SlotPlan& plan) {
    std::map<NodeId, Superframe> out;
    for (NodeId ap : aps) out.emplace(ap, Superframe(plan.total_slots, plan.slot_duration));
    for (std::size_t i = 0; i < links.size(); ++i) {
        auto it = out.find(links[i].src);
        if (it == out.end()) throw ScheduleError("link source is not one of the scheduled APs");
        for (std::size_t slot : plan.permitted[i]) {
            AccessPolicy policy = it->second.policy(slot);
            policy.add(topology.node(links[i].dst).mac, tid_to_tos(links[i].tid));
            it->second = set_access_policy(std::move(it->second), slot, std::move(policy));
        }
    }
    return out;
}

ScheduleSet make_per_node_schedule(const Topology& topology, std::span<const Link> links, std::span<const NodeId> aps,
                                   std::size_t total_slots, std::size_t slots_per_ap, std::size_t guard_count,
                                   Micros slot_duration) {
    ScheduleSet out;
    out.plan.total_slots = total_slots;
    out.plan.slot_duration = slot_duration;
    const auto blocks = layout_blocks(aps.size(), slots_per_ap, guard_count, total_slots, out.plan.guard_slots);
    Superframe blank(total_slots, slot_duration);

    for (const auto& link : links) out.plan.permitted.push_back(blocks[ap_index(aps, link.src)]);
    for (std::size_t a = 0; a < aps.size(); ++a) {
        Superframe sf = blank;
        for (std::size_t slot : blocks[a]) sf = set_access_policy(std::move(sf), slot, AccessPolicy::open());
        out.superframes.emplace(aps[a], std::move(sf));
    }
    (void)topology;
    return out;
}

ScheduleSet make_per_link_schedule(const Topology& topology, std::span<const Link> links, const ConflictGraph& graph,
                                   std::span<const NodeId> aps, std::size_t total_slots, std::size_t slots_per_group,
                                   std::size_t guard_count, Micros slot_duration, PerLinkOptions options) {
    if (graph.vertex_count() != links.size()) throw ScheduleError("conflict graph does not match link list");
    const auto colors = greedy_coloring(graph);
    std::size_t color_count = 0;
    for (const auto& c : colors) {
        if (c) color_count = std::max(color_count, *c + 1);
    }

    ScheduleSet out;
    out.plan.total_slots = total_slots;
    out.plan.slot_duration = slot_duration;
    out.plan.unconflicted_use_guards = options.unconflicted_use_guards;
    const auto blocks = layout_blocks(color_count, slots_per_group, guard_count, total_slots, out.plan.guard_slots);

    std::set<std::size_t> everywhere;
    for (std::size_t s = 0; s < total_slots; ++s) {
        if (options.unconflicted_use_guards || !out.plan.guard_slots.contains(s)) everywhere.insert(s);
    }
    for (std::size_t i = 0; i < links.size(); ++i) {
        ap_index(aps, links[i].src);
        out.plan.permitted.push_back(colors[i] ? blocks[*colors[i]] : everywhere);
    }
    out.superframes = superframes_from_plan(topology, links, aps, out.plan);
    return out;
}

ScheduleSet make_open_schedule(std::span<const Link> links, std::span<const NodeId> aps, std::size_t total_slots,
                               Micros slot_duration) {
    ScheduleSet out;
    out.plan.total_slots = total_slots;
    out.plan.slot_duration = slot_duration;
    std::set<std::size_t> all;
    for (std::size_t s = 0; s < total_slots; ++s) all.insert(s);
    out.plan.permitted.assign(links.size(), all);
    Superframe sf(total_slots, slot_duration);
    for (std::size_t s = 0; s < total_slots; ++s) sf = set_access_policy(std::move(sf), s, AccessPolicy::open());
    for (NodeId ap : aps) out.superframes.emplace(ap, sf);
    return out;
}

std::vector<Violation> verify_plan(const ConflictGraph& graph, const SlotPlan& plan) {
    std::vector<Violation> out;
    if (plan.permitted.size() != graph.vertex_count()) {
        out.push_back({"plan", "permission table does not cover every link"});
        return out;
    }
    for (const auto& e : graph.edges()) {
        for (std::size_t slot : plan.permitted[e.first]) {
            if (plan.permitted[e.second].contains(slot)) {
                out.push_back({"(" + std::to_string(e.first) + "," + std::to_string(e.second) + ")",
                               "conflicting links share slot " + std::to_string(slot)});
            }
        }
    }
    for (std::size_t v = 0; v < plan.permitted.size(); ++v) {
        if (plan.unconflicted_use_guards && graph.degree(v) == 0) continue;
        for (std::size_t slot : plan.permitted[v]) {
            if (plan.guard_slots.contains(slot)) {
                out.push_back({"link " + std::to_string(v), "permitted in guard slot " + std::to_string(slot)});
            }
            if (slot >= plan.total_slots) {
                out.push_back({"link " + std::to_string(v), "slot " + std::to_string(slot) + " out of range"});
            }
        }
    }
    return out;
}

}  // namespace hmacsim

// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hmacsim/dcf_mac.hpp"
#include "hmacsim/experiment.hpp"
#include "hmacsim/interference_manager.hpp"
#include "hmacsim/schedule.hpp"
#include "hmacsim/topology.hpp"

using namespace hmacsim;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::size_t link_named(const Scenario& s, const std::string& label) {
    for (std::size_t i = 0; i < s.links.size(); ++i)
        if (link_label(s.topology, s.links[i]) == label) return i;
    throw std::runtime_error("no link " + label);
}

std::vector<std::uint64_t> seeds(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t i = 1; i <= n; ++i) out.push_back(i);
    return out;
}

std::string fmt(double v, int precision = 4) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

Verdict hidden_node_starvation() {
    Scenario s = build_example(1);
    s.mode = Mode::Dcf;
    const std::size_t victim = link_named(s, "AP1->STA2");
    const double baseline = isolated_baseline(s, victim);
    double worst = 0.0;
    double slowest = 0.0;
    for (std::uint64_t seed : seeds(10)) {
        s.seed = seed;
        const auto t0 = std::chrono::steady_clock::now();
        const Metrics m = run(s);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        slowest = std::max(slowest, wall);
        worst = std::max(worst, m.links[victim].goodput_bps / baseline);
    }
    return {worst <= 0.05 && slowest < 10.0, "max goodput/baseline=" + fmt(worst) + " baseline=" + fmt(baseline) +
                                                 "bps slowest run=" + fmt(slowest) + "s"};
}

Verdict tdma_recovery() {
    Scenario s = build_example(1);
    s.mode = Mode::Tdma;
    const std::size_t victim = link_named(s, "AP1->STA2");
    const std::size_t other = link_named(s, "AP2->STA1");
    const double bound = 0.5 * isolated_baseline(s, victim) * 4.0 / 10.0 / 2.0;
    double lowest = 1e300;
    std::uint64_t collisions = 0;
    for (std::uint64_t seed : seeds(10)) {
        s.seed = seed;
        const Metrics m = run(s);
        lowest = std::min(lowest, m.links[victim].goodput_bps);
        collisions += m.links[victim].data_collisions + m.links[other].data_collisions;
    }
    return {lowest >= bound && collisions == 0, "min goodput=" + fmt(lowest) + "bps bound=" + fmt(bound) +
                                                    "bps conflicting-pair collisions=" + std::to_string(collisions)};
}

struct Example1Matrix {
    Report report;
    Example1Matrix() { report = run_matrix(build_example(1), {Mode::Tdma, Mode::Hmac}, seeds(10)); }
};

const Report& example1_matrix() {
    static const Example1Matrix matrix;
    return matrix.report;
}

Verdict spatial_reuse_gain() {
    const Report& r = example1_matrix();
    const double ratio = r.row("hmac", "total").goodput_bps_mean / r.row("tdma", "total").goodput_bps_mean;
    return {ratio >= 1.7 && ratio <= 2.5, "total hmac/tdma=" + fmt(ratio)};
}

Verdict unconflicted_gain() {
    const Report& r = example1_matrix();
    const double ratio = r.row("hmac", "AP1->STA3").goodput_bps_mean / r.row("tdma", "AP1->STA3").goodput_bps_mean;
    return {ratio >= 3.0 && ratio <= 5.5, "AP1->STA3 hmac/tdma=" + fmt(ratio)};
}

Verdict conflicting_constancy() {
    const Report& r = example1_matrix();
    bool ok = true;
    std::string detail;
    for (const char* link : {"AP1->STA2", "AP2->STA1"}) {
        const double t = r.row("tdma", link).goodput_bps_mean;
        const double h = r.row("hmac", link).goodput_bps_mean;
        const double rel = std::abs(h - t) / t;
        ok = ok && rel <= 0.15;
        detail += std::string(link) + " rel.diff=" + fmt(rel) + " ";
    }
    return {ok, detail};
}

Verdict jitter_pathology() {
    const std::vector<Micros> jitters = {0, 5'000, 15'000, 30'000};
    std::vector<double> means;
    for (Micros jitter : jitters) {
        Scenario s = build_example(1);
        s.mode = Mode::Hmac;
        s.duration_s = 10.0;
        s.control.jitter = jitter;
        double sum = 0.0;
        for (std::uint64_t seed : seeds(20)) {
            s.seed = seed;
            sum += static_cast<double>(run(s).overrun_count);
        }
        means.push_back(sum / 20.0);
    }
    bool monotone = true;
    for (std::size_t i = 1; i < means.size(); ++i) monotone = monotone && means[i] >= means[i - 1];
    std::string detail = "mean overruns at 0/5/15/30 ms:";
    for (double m : means) detail += " " + fmt(m);
    return {means.front() == 0.0 && means.back() > 0.0 && monotone, detail};
}

Verdict conflict_oracle() {
    std::size_t pairs = 0;
    std::string mismatches;
    for (int n : {1, 2, 3}) {
        const Scenario s = build_example(n);
        const ConflictSet conflicts = link_conflicts(s.topology, s.links);
        for (std::size_t i = 0; i < s.links.size(); ++i) {
            for (std::size_t j = i + 1; j < s.links.size(); ++j) {
                ++pairs;
                const auto [ra, rb] = pairwise_delivery_ratios(s, i, j);
                const bool predicted = conflicts.contains(LinkPair::of(i, j));
                const bool observed_conflict = std::min(ra, rb) < 0.95;
                const bool observed_clean = ra >= 0.99 && rb >= 0.99;
                const bool agree = predicted ? observed_conflict : observed_clean;
                if (!agree) {
                    mismatches += " ex" + std::to_string(n) + ":" + link_label(s.topology, s.links[i]) + "/" +
                                  link_label(s.topology, s.links[j]) + "(" + fmt(ra) + "," + fmt(rb) + ")";
                }
            }
        }
    }
    return {mismatches.empty(), std::to_string(pairs) + " pairs checked" +
                                    (mismatches.empty() ? "" : ", mismatches:" + mismatches)};
}

Verdict gating_soundness() {
    Scenario s = build_gated_ap_scenario();
    s.duration_s = 60.0;
    RunOptions opts;
    opts.record_medium_log = true;
    const RunResult r = run_detailed(s, opts);
    std::size_t starts = 0;
    std::size_t violations = 0;
    for (const Transmission& tx : r.medium_log) {
        if (tx.kind != FrameKind::Data) continue;
        ++starts;
        const auto it = r.schedules.find(tx.src);
        if (it == r.schedules.end()) continue;
        const SlotPosition pos = slot_at(it->second, tx.start);
        if (pos.tail_guard || !is_allowed(it->second, pos.index, s.topology.node(tx.dst).mac, tx.tid)) ++violations;
    }
    return {violations == 0 && starts > 0,
            std::to_string(starts) + " data starts, " + std::to_string(violations) + " outside permitted slots"};
}

Verdict dcf_micro_checks() {
    const PhyParams phy;
    Rng rng(2024);
    double sum = 0.0;
    constexpr int draws = 100'000;
    for (int i = 0; i < draws; ++i) sum += draw_backoff(rng, 0, phy);
    const double backoff_mean = sum / draws;

    std::vector<int> expected;
    int w = 16;
    for (int r = 0; r <= 8; ++r, w *= 2) expected.push_back(std::min(w - 1, 1023));
    bool cw_ok = true;
    for (int r = 0; r <= 8; ++r) cw_ok = cw_ok && contention_window(r, phy) == expected[r];

    bool deterministic = true;
    for (int n : {1, 2, 3}) {
        for (Mode mode : {Mode::Dcf, Mode::Tdma, Mode::Hmac}) {
            Scenario s = build_example(n);
            s.mode = mode;
            s.duration_s = 5.0;
            s.seed = 7;
            s.control.jitter = 3'000;
            deterministic = deterministic && run(s) == run(s);
        }
    }
    Scenario s = build_example(1);
    s.duration_s = 5.0;
    const Report a = run_matrix(s, {Mode::Dcf, Mode::Hmac}, {1, 2, 3}, 1);
    const Report b = run_matrix(s, {Mode::Dcf, Mode::Hmac}, {1, 2, 3}, 3);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        deterministic = deterministic && a.rows[i].goodput_bps_mean == b.rows[i].goodput_bps_mean &&
                        a.rows[i].goodput_bps_stderr == b.rows[i].goodput_bps_stderr &&
                        a.rows[i].data_collisions == b.rows[i].data_collisions &&
                        a.rows[i].retransmissions == b.rows[i].retransmissions &&
                        a.rows[i].airtime_fraction == b.rows[i].airtime_fraction;
    }
    const bool mean_ok = std::abs(backoff_mean - 7.5) <= 0.15;
    return {mean_ok && cw_ok && deterministic, "backoff mean=" + fmt(backoff_mean, 5) +
                                                   " cw sequence " + (cw_ok ? "ok" : "wrong") + ", determinism " +
                                                   (deterministic ? "ok" : "broken")};
}

Verdict schedule_synthesis() {
    std::mt19937_64 rng(10);
    constexpr std::size_t total = 60;
    constexpr std::size_t block = 4;
    constexpr std::size_t guards = 12;
    constexpr Micros slot = 10'000;
    std::size_t unsound = 0;
    std::size_t not_dominant = 0;
    std::size_t strict_cases = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
        const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        const double p = std::uniform_real_distribution<double>(0.0, 0.6)(rng);

        Topology topo;
        std::vector<NodeId> aps;
        for (std::size_t a = 0; a < k; ++a) aps.push_back(topo.add_node("AP" + std::to_string(a + 1), Role::AP));
        std::vector<Link> links;
        for (std::size_t i = 0; i < n; ++i) {
            const NodeId ap = aps[std::uniform_int_distribution<std::size_t>(0, k - 1)(rng)];
            const NodeId sta = topo.add_node("STA" + std::to_string(i + 1), Role::STA, ap);
            for (auto [a, b] : {std::pair{ap, sta}, std::pair{sta, ap}}) {
                topo.set_senses(a, b);
                topo.set_interferes(a, b);
            }
            links.push_back(Link{ap, sta});
        }
        ConflictSet edges;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (std::bernoulli_distribution(p)(rng)) edges.insert(LinkPair{i, j});
        const ConflictGraph graph(n, edges);

        const ScheduleSet per_link = make_per_link_schedule(topo, links, graph, aps, total, block, guards, slot);
        const ScheduleSet per_node = make_per_node_schedule(topo, links, aps, total, block, guards, slot);

        bool sound = verify_plan(graph, per_link.plan).empty();
        for (const LinkPair& e : edges) {
            for (std::size_t s : per_link.plan.permitted[e.first]) sound = sound && !per_link.plan.permitted[e.second].contains(s);
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (graph.degree(v) == 0) continue;
            for (std::size_t s : per_link.plan.permitted[v]) sound = sound && !per_link.plan.guard_slots.contains(s);
        }
        if (!sound) ++unsound;

        bool dominant = true;
        bool strict = false;
        bool has_unconflicted = false;
        for (std::size_t v = 0; v < n; ++v) {
            const std::size_t a = per_link.plan.permitted[v].size();
            const std::size_t b = per_node.plan.permitted[v].size();
            dominant = dominant && a >= b;
            if (graph.degree(v) == 0) {
                has_unconflicted = true;
                strict = strict || a > b;
            }
        }
        if (!edges.empty() && has_unconflicted) {
            ++strict_cases;
            dominant = dominant && strict;
        }
        if (!dominant) ++not_dominant;
    }
    return {unsound == 0 && not_dominant == 0, "500 graphs: " + std::to_string(unsound) + " unsound, " +
                                                   std::to_string(not_dominant) + " dominance failures (" +
                                                   std::to_string(strict_cases) + " strict-gain cases)"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"hidden-node starvation under DCF", hidden_node_starvation},
        {"classical TDMA recovery", tdma_recovery},
        {"spatial-reuse gain", spatial_reuse_gain},
        {"unconflicted-link gain", unconflicted_gain},
        {"constancy of conflicting links", conflicting_constancy},
        {"jitter pathology", jitter_pathology},
        {"conflict-oracle equivalence", conflict_oracle},
        {"gating soundness", gating_soundness},
        {"DCF micro-checks", dcf_micro_checks},
        {"schedule-synthesis properties", schedule_synthesis},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        if (!v.pass) ++failed;
        std::printf("criterion %zu [%s] %s: %s\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}

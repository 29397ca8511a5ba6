#include <doctest.h>

#include <map>
#include <random>

#include "hmacsim/schedule.hpp"

using namespace hmacsim;

namespace {

const MacAddress kSta = MacAddress::parse("34:13:e8:24:77:be");

Superframe gated_ap_superframe() {
    Superframe sf = new_superframe(10, 20'000);
    AccessPolicy be;
    be.add(kSta, 0);
    for (std::size_t slot : {1, 2, 3, 4}) sf = set_access_policy(sf, slot, be);
    return sf;
}

}  // namespace

TEST_CASE("tos to tid") {
    CHECK(tos_to_tid(0) == 0);
    CHECK(tos_to_tid(0xb8) == 5);
    CHECK(tos_to_tid(0xe0) == 7);
    for (std::uint8_t tid = 0; tid < 8; ++tid) CHECK(tos_to_tid(tid_to_tos(tid)) == tid);
}

TEST_CASE("new superframe") {
    const Superframe sf = new_superframe(10, 20'000);
    CHECK(sf.length() == 200'000);
    CHECK(sf.total_slots() == 10);
    for (const AccessPolicy& p : sf.policies()) CHECK(p.is_guard());

    CHECK(new_superframe(1, 1'000).length() == 1'000);
    CHECK(new_superframe(1, 1'000'000).length() == 1'000'000);
    CHECK_THROWS_AS(new_superframe(10, 200'000), ScheduleError);
    CHECK_THROWS_AS(new_superframe(0, 20'000), ScheduleError);
    CHECK_THROWS_AS(new_superframe(10, 0), ScheduleError);
    CHECK_THROWS_AS(new_superframe(10, -5), ScheduleError);
}

TEST_CASE("set access policy") {
    const Superframe sf = gated_ap_superframe();
    std::size_t permissive = 0;
    for (const AccessPolicy& p : sf.policies()) permissive += p.is_guard() ? 0 : 1;
    CHECK(permissive == 4);

    AccessPolicy p;
    p.add(kSta, 0xa0);
    const Superframe s0 = set_access_policy(sf, 0, p);
    CHECK(s0.policy(0) == p);
    CHECK_THROWS_AS(set_access_policy(sf, 10, p), ScheduleError);
    CHECK_THROWS_AS(sf.policy(10), ScheduleError);
}

TEST_CASE("update and remove access policy") {
    Superframe sf = gated_ap_superframe();
    sf = update_access_policy(sf, 2, AccessPolicy::open());
    CHECK(sf.policy(2).allows_all());
    sf = remove_access_policy(sf, 2);
    CHECK(sf.policy(2).is_guard());
    CHECK_FALSE(sf.policy(1).is_guard());
}

TEST_CASE("is allowed") {
    const Superframe sf = gated_ap_superframe();
    CHECK(is_allowed(sf, 2, kSta, 0));
    CHECK_FALSE(is_allowed(sf, 2, kSta, 5));
    CHECK_FALSE(is_allowed(sf, 2, MacAddress::parse("00:00:00:00:00:01"), 0));
    for (std::uint8_t tid = 0; tid < 8; ++tid) CHECK_FALSE(is_allowed(sf, 0, kSta, tid));
    const Superframe open = set_access_policy(sf, 0, AccessPolicy::open());
    CHECK(is_allowed(open, 0, MacAddress::parse("aa:bb:cc:dd:ee:ff"), 6));

    AccessPolicy disabled = AccessPolicy::open();
    disabled.add(kSta, 0).disable_all();
    CHECK(disabled.is_guard());
}

TEST_CASE("slot at") {
    const Superframe sf = new_superframe(10, 20'000);
    CHECK(slot_at(sf, 1'000'000) == SlotPosition{0, 0, false});
    CHECK(slot_at(sf, 1'035'000) == SlotPosition{1, 15'000, false});
    CHECK(slot_at(sf, 1'210'000) == SlotPosition{0, 10'000, false});

    const Superframe seven = new_superframe(7, 20'000);
    const SlotPosition tail = slot_at(seven, 999'000);
    CHECK(tail.tail_guard);
    CHECK(tail.into_slot == 19'000);
}

TEST_CASE("slot at agrees with a millisecond enumeration of the second") {
    // Oracle: lay superframes end to end from the second boundary and label every millisecond.
    for (std::size_t slots : {7, 10, 3}) {
        for (Micros dur : {20'000, 33'000}) {
            if (static_cast<Micros>(slots) * dur > 1'000'000) continue;
            const Superframe sf = new_superframe(slots, dur);
            std::map<Micros, std::pair<std::size_t, bool>> label;
            Micros start = 0;
            while (start + sf.length() <= 1'000'000) {
                for (std::size_t s = 0; s < slots; ++s)
                    for (Micros ms = start + static_cast<Micros>(s) * dur; ms < start + static_cast<Micros>(s + 1) * dur;
                         ms += 1'000)
                        label[ms] = {s, false};
                start += sf.length();
            }
            for (Micros ms = 0; ms < 1'000'000; ms += 1'000) {
                const SlotPosition pos = slot_at(sf, 5'000'000 + ms);
                const auto it = label.find(ms);
                if (it == label.end()) {
                    CHECK(pos.tail_guard);
                } else {
                    CHECK_FALSE(pos.tail_guard);
                    CHECK(pos.index == it->second.first);
                }
            }
        }
    }
}

TEST_CASE("property: slot at has a period of one second") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<Micros> t(0, 100'000'000);
    for (const Superframe& sf : {new_superframe(10, 20'000), new_superframe(7, 20'000), new_superframe(3, 1'700)}) {
        for (int i = 0; i < 2'000; ++i) {
            const Micros x = t(rng);
            CHECK(slot_at(sf, x) == slot_at(sf, x + 1'000'000));
        }
    }
}

TEST_CASE("next slot boundary") {
    const Superframe sf = new_superframe(10, 20'000);
    CHECK(next_slot_boundary(sf, 0) == 20'000);
    CHECK(next_slot_boundary(sf, 19'999) == 20'000);
    CHECK(next_slot_boundary(sf, 20'000) == 40'000);
    CHECK(next_slot_boundary(sf, 990'000) == 1'000'000);

    const Superframe seven = new_superframe(7, 20'000);
    CHECK(next_slot_boundary(seven, 975'000) == 980'000);
    CHECK(next_slot_boundary(seven, 980'000) == 1'000'000);
    CHECK(next_slot_boundary(seven, 1'999'999) == 2'000'000);
}

TEST_CASE("gate set for") {
    const Superframe sf = gated_ap_superframe();
    const std::vector<QueueKey> queues = {QueueKey{kSta, 0}};
    CHECK(gate_set_for(sf, 2, queues).paused.empty());
    CHECK(gate_set_for(sf, 0, queues).paused == std::set<QueueKey>{QueueKey{kSta, 0}});
    const Superframe open = set_access_policy(sf, 0, AccessPolicy::open());
    CHECK(gate_set_for(open, 0, queues).paused.empty());

    const Superframe seven = new_superframe(7, 20'000);
    CHECK(gate_set_for(set_access_policy(seven, 6, AccessPolicy::open()), slot_at(seven, 990'000), queues).paused.size() == 1);
}

TEST_CASE("property: gated iff not allowed, exhaustively on the gated AP superframe") {
    const Superframe sf = gated_ap_superframe();
    std::vector<QueueKey> queues;
    for (const char* mac : {"34:13:e8:24:77:be", "02:00:00:00:00:05", "02:00:00:00:00:06"})
        for (std::uint8_t tid = 0; tid < 8; ++tid) queues.push_back(QueueKey{MacAddress::parse(mac), tid});
    for (std::size_t slot = 0; slot < sf.total_slots(); ++slot) {
        const GateSet g = gate_set_for(sf, slot, queues);
        for (const QueueKey& q : queues) CHECK(g.paused.contains(q) == !is_allowed(sf, slot, q.dest, q.tid));
    }
}

TEST_CASE("property: set access policy leaves other slots untouched") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 20)(rng);
        Superframe sf = new_superframe(n, 10'000);
        for (std::size_t s = 0; s < n; ++s) {
            AccessPolicy p;
            const int kind = std::uniform_int_distribution<int>(0, 2)(rng);
            if (kind == 1) p.allow_all();
            if (kind == 2) p.add(MacAddress::for_node(NodeId{static_cast<std::uint32_t>(s)}), tid_to_tos(s % 8));
            sf = set_access_policy(sf, s, p);
        }
        const std::size_t target = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
        AccessPolicy fresh;
        fresh.add(MacAddress::for_node(NodeId{999}), 0x20);
        const Superframe after = set_access_policy(sf, target, fresh);
        for (std::size_t s = 0; s < n; ++s) {
            if (s == target)
                CHECK(after.policy(s) == fresh);
            else
                CHECK(after.policy(s) == sf.policy(s));
        }
    }
}

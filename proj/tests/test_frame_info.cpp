#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "tdmasim/frame_info.hpp"
#include "tdmasim/rng.hpp"

using namespace tdma;

namespace {

const SlotParams kSlots{20, 16};
const Tick kModulus = 20 * 16 * 64;
const Tick kTimeout = 3 * 20 * 16;

FrameInfoSet make_set(std::initializer_list<FrameInfoEntry> entries) {
    FrameInfoSet fi;
    fi.time_out = kTimeout;
    fi.entries = entries;
    return fi;
}

// Tick-by-tick coverage oracle: a transmission stamped t occupies every slot
// its airtime [t, t+xi) touches. Slot numbers are recomputed here from first
// principles so the oracle stays independent of the library arithmetic.
SlotSet coverage_oracle(const FrameInfoSet& fi, const SlotParams& p, Tick c) {
    SlotSet out;
    for (const auto& e : fi.entries)
        for (Tick t = 0; t < p.xi; ++t) {
            const Tick tick = (e.rx_time + t) % c;
            out.insert(tick / p.xi % p.tau);
        }
    return out;
}

} // namespace

TEST_CASE("local_entries filters by occurrence") {
    CHECK(local_entries(make_set({})).entries.empty());
    const auto fi = make_set({{7, EntryKind::Msg, Occurrence::Local, 10},
                              {9, EntryKind::Msg, Occurrence::Remote, 10}});
    const auto local = local_entries(fi);
    REQUIRE(local.entries.size() == 1);
    CHECK(local.entries[0].id == 7);
    CHECK(fi.entries.size() == 2);   // input unmodified
    const auto remote_only = make_set({{1, EntryKind::Msg, Occurrence::Remote, 5},
                                       {2, EntryKind::Welcome, Occurrence::Remote, 9}});
    CHECK(local_entries(remote_only).entries.empty());
}

TEST_CASE("used_slots per-entry coverage") {
    CHECK(used_slots(make_set({{1, EntryKind::Msg, Occurrence::Local, 0}}), kSlots, kModulus) ==
          SlotSet{0});
    CHECK(used_slots(make_set({{1, EntryKind::Msg, Occurrence::Local, 10}}), kSlots, kModulus) ==
          SlotSet{0, 1});
    // Around the frame boundary the interval wraps onto slot 0.
    CHECK(used_slots(make_set({{1, EntryKind::Msg, Occurrence::Local, 315}}), kSlots, kModulus) ==
          SlotSet{15, 0});
}

TEST_CASE("used_slots equals the tick coverage oracle") {
    Rng rng(1234);
    for (int k = 0; k < 1000; ++k) {
        const Tick xi = std::array<Tick, 3>{1, 5, 20}[rng.uniform(0, 2)];
        const Tick tau = rng.uniform(0, 1) ? 4 : 16;
        const SlotParams p{xi, tau};
        const Tick c = xi * tau * 32;
        FrameInfoSet fi;
        fi.time_out = c / 4;
        const std::size_t m = rng.uniform(0, 10);
        for (std::size_t e = 0; e < m; ++e)
            fi.entries.push_back({static_cast<NodeId>(e), EntryKind::Msg, Occurrence::Local,
                                  rng.uniform(0, c - 1)});
        CHECK(used_slots(fi, p, c) == coverage_oracle(fi, p, c));
        CHECK(used_slots(fi, p, c).size() <= 2 * fi.entries.size());
    }
}

TEST_CASE("unused_slots complements used_slots") {
    SlotSet all;
    for (Tick s = 0; s < 16; ++s) all.insert(s);
    CHECK(unused_slots(make_set({}), kSlots, kModulus) == all);

    SlotSet rest = all;
    rest.erase(0);
    CHECK(unused_slots(make_set({{1, EntryKind::Msg, Occurrence::Local, 0}}), kSlots,
                       kModulus) == rest);

    const SlotParams three{20, 3};
    const auto fi = make_set({{1, EntryKind::Msg, Occurrence::Local, 0},
                              {2, EntryKind::Msg, Occurrence::Local, 20},
                              {3, EntryKind::Msg, Occurrence::Local, 40}});
    CHECK(unused_slots(fi, three, kModulus).empty());
}

TEST_CASE("is_unused with the local fallback") {
    CHECK(is_unused(3, make_set({}), kSlots, kModulus));

    // Remote entries cover all 16 slots, local entries only slot 0: the
    // two-hop view is exhausted and the fallback answers for direct
    // neighbors only.
    FrameInfoSet fi = make_set({});
    for (Tick s = 0; s < 16; ++s)
        fi.entries.push_back({static_cast<NodeId>(100 + s), EntryKind::Msg,
                              Occurrence::Remote, s * 20});
    fi.entries.push_back({1, EntryKind::Msg, Occurrence::Local, 0});
    REQUIRE(unused_slots(fi, kSlots, kModulus).empty());
    CHECK(is_unused(1, fi, kSlots, kModulus));
    CHECK_FALSE(is_unused(0, fi, kSlots, kModulus));

    // Local entries covering everything defeat both branches.
    FrameInfoSet local_all = make_set({});
    for (Tick s = 0; s < 16; ++s)
        local_all.entries.push_back({static_cast<NodeId>(s), EntryKind::Msg,
                                     Occurrence::Local, s * 20});
    for (Tick s = 0; s < 16; ++s) CHECK_FALSE(is_unused(s, local_all, kSlots, kModulus));
}

TEST_CASE("is_unused implies the slot is free of local transmissions") {
    Rng rng(99);
    for (int k = 0; k < 500; ++k) {
        FrameInfoSet fi = make_set({});
        const std::size_t m = rng.uniform(0, 12);
        for (std::size_t e = 0; e < m; ++e)
            fi.entries.push_back({static_cast<NodeId>(rng.uniform(0, 30)), EntryKind::Msg,
                                  rng.uniform(0, 1) ? Occurrence::Local : Occurrence::Remote,
                                  rng.uniform(0, kModulus - 1)});
        const auto local_used = used_slots(local_entries(fi), kSlots, kModulus);
        for (Tick s = 0; s < kSlots.tau; ++s)
            if (is_unused(s, fi, kSlots, kModulus)) CHECK_FALSE(local_used.contains(s));
    }
}

TEST_CASE("conflict_with_neighbors") {
    // (a) an empty payload means our transmission was not acknowledged.
    CHECK(conflict_with_neighbors({}, 4, 7, 100, 100, kSlots, kModulus));

    // Acknowledged, sender in slot 5, third entry in slot 2, own slot 7:
    // no branch fires.
    const std::vector<FrameInfoEntry> ack{{4, EntryKind::Msg, Occurrence::Local, 40},
                                          {9, EntryKind::Msg, Occurrence::Local, 40}};
    CHECK_FALSE(conflict_with_neighbors(ack, 4, 7, 100, 100, kSlots, kModulus));

    // (b) the sender's own transmission covers our slot.
    CHECK(conflict_with_neighbors(ack, 4, 5, 100, 100, kSlots, kModulus));

    // (c) a translated entry covers our slot. The receiver is 40 ticks ahead
    // of the sender, so the entry stamped 90 translates to 130, covering
    // slots 6 and 7.
    const std::vector<FrameInfoEntry> third{{4, EntryKind::Msg, Occurrence::Local, 40},
                                            {9, EntryKind::Msg, Occurrence::Local, 90}};
    const Tick t_send = 100;
    const Tick t_recv = 140;
    REQUIRE(slots_covered((90 + 40) % kModulus, kSlots, kModulus) == SlotSet{6, 7});
    CHECK(conflict_with_neighbors(third, 4, 7, t_send, t_recv, kSlots, kModulus));
    CHECK(conflict_with_neighbors(third, 4, 6, t_send, t_recv, kSlots, kModulus));
    CHECK_FALSE(conflict_with_neighbors(third, 4, 8, t_send, t_recv, kSlots, kModulus));
}

TEST_CASE("merge_remote") {
    SUBCASE("empty payload leaves the set unchanged") {
        auto fi = make_set({{1, EntryKind::Msg, Occurrence::Local, 10}});
        merge_remote(fi, {}, 5, 20, kSlots, kModulus);
        CHECK(fi.entries.size() == 1);
    }
    SUBCASE("negative offsets do not shift timestamps") {
        auto fi = make_set({});
        const std::vector<FrameInfoEntry> rx{{3, EntryKind::Msg, Occurrence::Local, 50}};
        merge_remote(fi, rx, -5, 60, kSlots, kModulus);
        REQUIRE(fi.entries.size() == 1);
        CHECK(fi.entries[0].rx_time == 50);
        CHECK(fi.entries[0].occurrence == Occurrence::Remote);
    }
    SUBCASE("positive offsets re-stamp into the receiver frame") {
        auto fi = make_set({});
        const std::vector<FrameInfoEntry> rx{{3, EntryKind::Msg, Occurrence::Local, 50}};
        merge_remote(fi, rx, 30, 100, kSlots, kModulus);
        REQUIRE(fi.entries.size() == 1);
        CHECK(fi.entries[0].rx_time == 80);
    }
    SUBCASE("entries older than time_out are dropped") {
        auto fi = make_set({});
        const std::vector<FrameInfoEntry> rx{{3, EntryKind::Msg, Occurrence::Local, 0}};
        merge_remote(fi, rx, 0, kTimeout + 1, kSlots, kModulus);
        CHECK(fi.entries.empty());
    }
    SUBCASE("duplicate (id, slot) keeps the youngest") {
        auto fi = make_set({{3, EntryKind::Msg, Occurrence::Remote, 40}});
        const std::vector<FrameInfoEntry> younger{{3, EntryKind::Msg, Occurrence::Local,
                                                   40 + kSlots.frame_ticks()}};
        merge_remote(fi, younger, 0, 40 + kSlots.frame_ticks() + 5, kSlots, kModulus);
        REQUIRE(fi.entries.size() == 1);
        CHECK(fi.entries[0].rx_time == 40 + kSlots.frame_ticks());
    }
    SUBCASE("an equally young local incumbent survives") {
        auto fi = make_set({{3, EntryKind::Msg, Occurrence::Local, 40}});
        const std::vector<FrameInfoEntry> echo{{3, EntryKind::Msg, Occurrence::Local, 40}};
        merge_remote(fi, echo, 0, 45, kSlots, kModulus);
        REQUIRE(fi.entries.size() == 1);
        CHECK(fi.entries[0].occurrence == Occurrence::Local);
    }
}

TEST_CASE("record_local replaces all knowledge about the sender") {
    auto fi = make_set({});
    record_local(fi, 7, EntryKind::Msg, 100);
    REQUIRE(fi.entries.size() == 1);
    CHECK(fi.entries[0].kind == EntryKind::Msg);
    CHECK(fi.entries[0].occurrence == Occurrence::Local);

    auto stale = make_set({{7, EntryKind::Welcome, Occurrence::Local, 10},
                           {7, EntryKind::Msg, Occurrence::Remote, 30},
                           {9, EntryKind::Msg, Occurrence::Local, 20}});
    record_local(stale, 7, EntryKind::Msg, 200);
    CHECK(stale.entries.size() == 2);
    std::size_t sevens = 0;
    for (const auto& e : stale.entries)
        if (e.id == 7) {
            ++sevens;
            CHECK(e.rx_time == 200);
        }
    CHECK(sevens == 1);
    // Other ids untouched.
    CHECK(std::any_of(stale.entries.begin(), stale.entries.end(),
                      [](const auto& e) { return e.id == 9 && e.rx_time == 20; }));
}

TEST_CASE("cleanup") {
    auto fresh = make_set({{1, EntryKind::Msg, Occurrence::Local, 90},
                           {2, EntryKind::Msg, Occurrence::Remote, 80}});
    cleanup(fresh, 100, kModulus);
    CHECK(fresh.entries.size() == 2);

    auto old = make_set({{1, EntryKind::Msg, Occurrence::Local, 0}});
    cleanup(old, kTimeout + 1, kModulus);
    CHECK(old.entries.empty());
}

TEST_CASE("cleanup matches a filtering oracle and is idempotent") {
    Rng rng(555);
    for (int k = 0; k < 100; ++k) {
        FrameInfoSet fi = make_set({});
        const Tick now = rng.uniform(0, kModulus - 1);
        const std::size_t m = rng.uniform(0, 16);
        for (std::size_t e = 0; e < m; ++e)
            fi.entries.push_back({static_cast<NodeId>(e), EntryKind::Msg, Occurrence::Local,
                                  rng.uniform(0, kModulus - 1)});
        std::vector<FrameInfoEntry> expect;
        for (const auto& e : fi.entries)
            if (mod_sub(now, e.rx_time, kModulus) <= kTimeout) expect.push_back(e);
        cleanup(fi, now, kModulus);
        CHECK(fi.entries == expect);
        auto again = fi;
        cleanup(again, now, kModulus);
        CHECK(again.entries == fi.entries);
    }
}

TEST_CASE("shift_timestamps preserves ages") {
    auto fi = make_set({});
    shift_timestamps(fi, 0, kModulus);
    CHECK(fi.entries.empty());

    auto one = make_set({{1, EntryKind::Msg, Occurrence::Local, 10}});
    shift_timestamps(one, 30, 100);
    CHECK(one.entries[0].rx_time == 40);

    Rng rng(321);
    for (int k = 0; k < 300; ++k) {
        FrameInfoSet set = make_set({});
        const std::size_t m = rng.uniform(1, 10);
        for (std::size_t e = 0; e < m; ++e)
            set.entries.push_back({static_cast<NodeId>(e), EntryKind::Msg, Occurrence::Local,
                                   rng.uniform(0, kModulus - 1)});
        const Tick now = rng.uniform(0, kModulus - 1);
        const Tick delta = rng.uniform(0, kModulus - 1);
        auto shifted = set;
        shift_timestamps(shifted, delta, kModulus);
        CHECK(shifted.entries.size() == set.entries.size());
        const Tick now_shifted = (now + delta) % kModulus;
        for (std::size_t e = 0; e < m; ++e)
            CHECK(mod_sub(now_shifted, shifted.entries[e].rx_time, kModulus) ==
                  mod_sub(now, set.entries[e].rx_time, kModulus));
    }
}

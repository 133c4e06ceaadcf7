#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "tdmasim/clock.hpp"

namespace tdma {

enum class EntryKind : std::uint8_t { Msg = 0, Welcome = 1 };
enum class Occurrence : std::uint8_t { Local = 0, Remote = 1 };

// One record of a recently heard transmission. rx_time is in the owning
// node's clock frame and is re-stamped whenever that clock is adjusted.
// An entry with timestamp t stands for airtime [t, t + xi).
struct FrameInfoEntry {
    NodeId id{};
    EntryKind kind{EntryKind::Msg};
    Occurrence occurrence{Occurrence::Local};
    Tick rx_time{};

    bool operator==(const FrameInfoEntry&) const = default;
};

// Aggregated frame information of one node. At most one local entry exists
// per sender id; entries older than time_out are dropped by cleanup().
struct FrameInfoSet {
    std::vector<FrameInfoEntry> entries;
    Tick time_out{0};
};

using SlotSet = std::set<Tick>;

// Slot numbers intersected by the airtime [t, t + xi), wrapping mod tau.
// An aligned transmission covers one slot, a misaligned one covers two.
SlotSet slots_covered(Tick rx_time, const SlotParams& p, Tick modulus);

FrameInfoSet local_entries(const FrameInfoSet& fi);

SlotSet used_slots(const FrameInfoSet& fi, const SlotParams& p, Tick modulus);

SlotSet unused_slots(const FrameInfoSet& fi, const SlotParams& p, Tick modulus);

// True iff s is unused according to the whole set, or the set marks every
// slot used and s is unused among direct (local) neighbors only. The
// fallback is what keeps slot claiming alive when two-hop knowledge covers
// the entire frame.
bool is_unused(Tick s, const FrameInfoSet& fi, const SlotParams& p, Tick modulus);

// Conflict test run by an active receiver against the frame information a
// neighbor sent. Timestamps in `received` follow the sender's clock; they
// translate into the receiver's frame by (t_recv - t_send). A conflict is:
// (a) no entry for own_id (the sender did not hear us), or (b) own_slot is
// covered by the sender's transmission airtime, or (c) some other node's
// translated airtime covers own_slot.
bool conflict_with_neighbors(std::span<const FrameInfoEntry> received,
                             NodeId own_id, Tick own_slot,
                             Tick t_send, Tick t_recv,
                             const SlotParams& p, Tick modulus);

// Merge received entries as remote knowledge. Each timestamp is re-stamped
// z' = (z + max{0, offset}) mod c and kept only while young enough. Among
// entries with the same (id, start slot) only the youngest survives.
void merge_remote(FrameInfoSet& fi, std::span<const FrameInfoEntry> received,
                  std::int64_t offset, Tick now, const SlotParams& p, Tick modulus);

// Replace all knowledge about `sender` with one fresh local entry.
void record_local(FrameInfoSet& fi, NodeId sender, EntryKind kind, Tick rx_time);

void cleanup(FrameInfoSet& fi, Tick now, Tick modulus);

// Advance every timestamp by delta mod c; entry ages relative to a clock
// advanced by the same delta are preserved.
void shift_timestamps(FrameInfoSet& fi, Tick delta, Tick modulus);

} // namespace tdma

#include "tdmasim/frame_info.hpp"

#include <algorithm>

namespace tdma {

SlotSet slots_covered(Tick rx_time, const SlotParams& p, Tick modulus) {
    SlotSet out;
    out.insert(slot_of(rx_time % modulus, p));
    out.insert(slot_of((rx_time + p.xi - 1) % modulus, p));
    return out;
}

FrameInfoSet local_entries(const FrameInfoSet& fi) {
    FrameInfoSet out;
    out.time_out = fi.time_out;
    for (const auto& e : fi.entries)
        if (e.occurrence == Occurrence::Local) out.entries.push_back(e);
    return out;
}

SlotSet used_slots(const FrameInfoSet& fi, const SlotParams& p, Tick modulus) {
    SlotSet out;
    for (const auto& e : fi.entries) {
        out.insert(slot_of(e.rx_time % modulus, p));
        out.insert(slot_of((e.rx_time + p.xi - 1) % modulus, p));
    }
    return out;
}

SlotSet unused_slots(const FrameInfoSet& fi, const SlotParams& p, Tick modulus) {
    const SlotSet used = used_slots(fi, p, modulus);
    SlotSet out;
    for (Tick s = 0; s < p.tau; ++s)
        if (!used.contains(s)) out.insert(s);
    return out;
}

bool is_unused(Tick s, const FrameInfoSet& fi, const SlotParams& p, Tick modulus) {
    const SlotSet unused = unused_slots(fi, p, modulus);
    if (unused.contains(s)) return true;
    if (!unused.empty()) return false;
    return unused_slots(local_entries(fi), p, modulus).contains(s);
}

bool conflict_with_neighbors(std::span<const FrameInfoEntry> received,
                             NodeId own_id, Tick own_slot,
                             Tick t_send, Tick t_recv,
                             const SlotParams& p, Tick modulus) {
    bool acknowledged = false;
    for (const auto& e : received) {
        if (e.id == own_id) {
            acknowledged = true;
            break;
        }
    }
    if (!acknowledged) return true;

    // The sender's own airtime in the receiver's clock frame.
    if (slots_covered(t_recv, p, modulus).contains(own_slot)) return true;

    const Tick shift = mod_sub(t_recv, t_send, modulus);
    for (const auto& e : received) {
        if (e.id == own_id) continue;
        const Tick translated = (e.rx_time + shift) % modulus;
        if (slots_covered(translated, p, modulus).contains(own_slot)) return true;
    }
    return false;
}

void merge_remote(FrameInfoSet& fi, std::span<const FrameInfoEntry> received,
                  std::int64_t offset, Tick now, const SlotParams& p, Tick modulus) {
    const Tick shift = offset > 0 ? static_cast<Tick>(offset) : 0;
    for (const auto& e : received) {
        const Tick stamped = (e.rx_time + shift) % modulus;
        if (!age_within(stamped, now, fi.time_out, modulus)) continue;

        const Tick start_slot = slot_of(stamped, p);
        const Tick age = mod_sub(now, stamped, modulus);
        bool superseded = false;
        for (auto it = fi.entries.begin(); it != fi.entries.end();) {
            if (it->id == e.id && slot_of(it->rx_time % modulus, p) == start_slot) {
                if (mod_sub(now, it->rx_time, modulus) <= age) {
                    superseded = true;    // incumbent at least as young, keep it
                    ++it;
                } else {
                    it = fi.entries.erase(it);
                }
            } else {
                ++it;
            }
        }
        if (!superseded)
            fi.entries.push_back({e.id, e.kind, Occurrence::Remote, stamped});
    }
}

void record_local(FrameInfoSet& fi, NodeId sender, EntryKind kind, Tick rx_time) {
    std::erase_if(fi.entries, [sender](const FrameInfoEntry& e) { return e.id == sender; });
    fi.entries.push_back({sender, kind, Occurrence::Local, rx_time});
}

void cleanup(FrameInfoSet& fi, Tick now, Tick modulus) {
    std::erase_if(fi.entries, [&](const FrameInfoEntry& e) {
        return !age_within(e.rx_time, now, fi.time_out, modulus);
    });
}

void shift_timestamps(FrameInfoSet& fi, Tick delta, Tick modulus) {
    for (auto& e : fi.entries)
        e.rx_time = (e.rx_time + delta % modulus) % modulus;
}

} // namespace tdma

#include "tdmasim/protocol.hpp"

#include <cassert>

namespace tdma {

BackoffResult backoff_with(std::uint64_t r, std::uint64_t wait_add,
                           std::uint64_t two_hop_bound) {
    assert(r >= 1 && r <= 3 * two_hop_bound);
    return {r + wait_add, 3 * two_hop_bound - r};
}

BackoffResult backoff(std::uint64_t wait_add, std::uint64_t two_hop_bound, Rng& rng) {
    return backoff_with(rng.uniform(1, 3 * two_hop_bound), wait_add, two_hop_bound);
}

namespace {

Packet make_packet(const NodeState& state, std::vector<std::uint8_t> payload) {
    Packet pkt;
    pkt.sender_status = state.status;
    pkt.fi_payload = local_entries(state.fi).entries;
    pkt.payload = std::move(payload);
    return pkt;
}

} // namespace

TimeslotResult on_timeslot(NodeState& state, const ProtocolParams& params,
                           const PayloadSource& fetch, Rng& rng) {
    const Tick now = state.clock.value;
    const Tick c = params.clock_modulus;
    assert(now % params.slots.xi == 0 && "timeslot handler fired off a slot boundary");

    const Tick current_slot = slot_of(now, params.slots);
    TimeslotResult result;

    if (current_slot == state.data_slot && state.status == Status::Active) {
        // Our slot: send a data packet.
        auto payload = fetch();
        assert(!payload.empty() && "data packets must carry a payload");
        result.action = TimeslotAction::DataPacket;
        result.packet = make_packet(state, std::move(payload));
    } else if (!(state.status == Status::Active &&
                 frame_of(now, params.slots) != state.data_slot)) {
        // Passive nodes run the control machinery every slot; active nodes
        // only in frames whose number matches their slot.
        if (state.wait == 0 && is_unused(current_slot, state.fi, params.slots, c)) {
            // Status is captured before the claim below: a claiming packet
            // still identifies its sender as passive.
            result.action = TimeslotAction::ControlPacket;
            result.packet = make_packet(state, {});
            const BackoffResult b = backoff(state.wait_add, params.two_hop_bound, rng);
            state.wait = b.wait;
            state.wait_add = b.wait_add;
            if (state.status != Status::Active) {
                state.data_slot = current_slot;
                state.status = Status::Active;
            }
        } else if (state.wait > 0 &&
                   is_unused((current_slot + params.slots.tau - 1) % params.slots.tau,
                             state.fi, params.slots, c)) {
            state.wait -= 1;
        }
    }

    cleanup(state.fi, now, c);
    return result;
}

ReceiveEffects on_receive(NodeState& state, const ProtocolParams& params,
                          const ReceiveMeta& meta, const Packet& packet, Rng& rng) {
    const Tick c = params.clock_modulus;
    ReceiveEffects fx;

    if (state.status == Status::Active &&
        conflict_with_neighbors(packet.fi_payload, state.id, state.data_slot,
                                meta.t_send, meta.t_recv, params.slots, c)) {
        const BackoffResult b = backoff(state.wait_add, params.two_hop_bound, rng);
        state.wait = b.wait;
        state.wait_add = b.wait_add;
        state.status = Status::Passive;
        fx.conflict_backoff = true;
    }

    if (packet.sender_status == Status::Active) {
        if (packet.is_data()) {
            record_local(state.fi, meta.sender, EntryKind::Msg, meta.t_recv);
            fx.recorded_msg = true;
        }
    } else if (meta.t_send == meta.t_recv &&
               !used_slots(state.fi, params.slots, c)
                    .contains(slot_of(meta.t_send, params.slots))) {
        // A passive sender whose slot grid is aligned with ours and whose
        // slot we consider free gets welcomed.
        record_local(state.fi, meta.sender, EntryKind::Welcome, meta.t_recv);
        fx.recorded_welcome = true;
    }

    if (strictly_newer(meta.t_recv, meta.t_send, c)) {
        const Tick delta = mod_sub(meta.t_send, meta.t_recv, c);
        state.clock = advance(state.clock, delta);
        shift_timestamps(state.fi, delta, c);
        const BackoffResult b = backoff(state.wait_add, params.two_hop_bound, rng);
        state.wait = b.wait;
        state.wait_add = b.wait_add;
        state.status = Status::Passive;
        fx.clock_adjusted = true;
        fx.adjust_delta = delta;
    }

    merge_remote(state.fi, packet.fi_payload,
                 signed_offset(meta.t_recv, meta.t_send, c),
                 state.clock.value, params.slots, c);

    fx.deliver_payload = packet.is_data();
    return fx;
}

NodeState arbitrary_state(NodeId id, const ProtocolParams& params,
                          std::uint64_t id_bound, Rng& rng) {
    const Tick c = params.clock_modulus;
    NodeState st;
    st.id = id;
    st.status = rng.uniform(0, 1) ? Status::Active : Status::Passive;
    st.data_slot = rng.uniform(0, params.slots.tau - 1);
    st.wait = rng.uniform(0, params.max_wait());
    st.wait_add = rng.uniform(0, 3 * params.two_hop_bound - 1);
    st.clock = {rng.uniform(0, c - 1), c};
    st.fi.time_out = params.time_out;

    const std::uint64_t count = rng.uniform(0, 2 * params.two_hop_bound);
    for (std::uint64_t k = 0; k < count; ++k) {
        FrameInfoEntry e;
        e.id = static_cast<NodeId>(rng.uniform(0, id_bound - 1));
        e.kind = rng.uniform(0, 1) ? EntryKind::Welcome : EntryKind::Msg;
        e.occurrence = rng.uniform(0, 1) ? Occurrence::Remote : Occurrence::Local;
        e.rx_time = mod_sub(st.clock.value, rng.uniform(0, params.time_out), c);
        if (e.occurrence == Occurrence::Local) {
            // At most one local entry per id.
            bool duplicate = false;
            for (const auto& other : st.fi.entries)
                if (other.occurrence == Occurrence::Local && other.id == e.id)
                    duplicate = true;
            if (duplicate) e.occurrence = Occurrence::Remote;
        }
        st.fi.entries.push_back(e);
    }
    return st;
}

} // namespace tdma

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "tdmasim/clock.hpp"
#include "tdmasim/frame_info.hpp"
#include "tdmasim/rng.hpp"

namespace tdma {

enum class Status : std::uint8_t { Passive = 0, Active = 1 };

// Per-node constants shared by every handler invocation.
struct ProtocolParams {
    SlotParams slots{};
    Tick clock_modulus{1};
    Tick time_out{0};
    std::uint64_t two_hop_bound{1};   // Delta, the bound fed to the backoff draw

    std::uint64_t max_wait() const { return 6 * two_hop_bound; }
};

// Full protocol state of one node. data_slot is meaningful while the node
// is active and merely retained otherwise.
struct NodeState {
    NodeId id{};
    Status status{Status::Passive};
    Tick data_slot{0};
    std::uint64_t wait{0};
    std::uint64_t wait_add{0};
    ModularClock clock{};
    FrameInfoSet fi{};
};

// An on-air packet. Control packets carry an empty payload; data packets a
// non-empty one. The frame-information payload is the sender's Local(FI);
// occurrence is not transmitted and receivers re-mark merged entries remote.
struct Packet {
    Status sender_status{Status::Passive};
    std::vector<FrameInfoEntry> fi_payload;
    std::vector<std::uint8_t> payload;

    bool is_data() const { return !payload.empty(); }
};

// Receive-event metadata: both timestamps are taken at the transmit-start
// instant, t_send on the sender's clock and t_recv on the receiver's.
struct ReceiveMeta {
    NodeId sender{};
    Tick t_send{};
    Tick t_recv{};
};

struct BackoffResult {
    std::uint64_t wait;
    std::uint64_t wait_add;
};

// The backoff recurrence with an explicit draw r in [1, 3*Delta]:
// returns (r + wait_add, 3*Delta - r).
BackoffResult backoff_with(std::uint64_t r, std::uint64_t wait_add,
                           std::uint64_t two_hop_bound);

BackoffResult backoff(std::uint64_t wait_add, std::uint64_t two_hop_bound, Rng& rng);

enum class TimeslotAction : std::uint8_t { None = 0, DataPacket = 1, ControlPacket = 2 };

struct TimeslotResult {
    TimeslotAction action{TimeslotAction::None};
    std::optional<Packet> packet;
};

using PayloadSource = std::function<std::vector<std::uint8_t>()>;

// The timeslot handler. Must be called exactly at slot boundaries of the
// node's own clock (clock value divisible by xi); anything else is a caller
// bug. In order:
//   1. an active node in its own data slot emits a data packet;
//   2. otherwise, unless the node is active outside the frame matching its
//      slot number, it either emits a control packet (current slot unused
//      and the countdown expired, claiming the slot if passive) or counts
//      the countdown down when the previous slot was unused;
//   3. expired frame-information entries are dropped.
TimeslotResult on_timeslot(NodeState& state, const ProtocolParams& params,
                           const PayloadSource& fetch, Rng& rng);

struct ReceiveEffects {
    bool conflict_backoff{false};
    bool recorded_msg{false};
    bool recorded_welcome{false};
    bool clock_adjusted{false};
    Tick adjust_delta{0};
    bool deliver_payload{false};
};

// The receive handler, in the order of the protocol's receive event:
// conflict detection (may turn an active node passive), acknowledgement
// recording for active senders with data, welcome recording for aligned
// passive senders on unused slots, converge-to-the-max clock adoption with
// timestamp shifting, remote merge of the sender's frame information, and
// payload delivery.
ReceiveEffects on_receive(NodeState& state, const ProtocolParams& params,
                          const ReceiveMeta& meta, const Packet& packet, Rng& rng);

// Uniformly random, well-typed node state: the transient-fault adversary.
// id_bound is the bound on identifiers that may appear in generated frame
// information (nu > |P|).
NodeState arbitrary_state(NodeId id, const ProtocolParams& params,
                          std::uint64_t id_bound, Rng& rng);

} // namespace tdma

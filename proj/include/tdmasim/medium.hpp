#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tdmasim/clock.hpp"
#include "tdmasim/rng.hpp"
#include "tdmasim/topology.hpp"

namespace tdma {

// One on-air transmission occupying the half-open global interval
// [start, start + duration). The nominal airtime is a full timeslot;
// computation jitter delays the start within the slot without moving the
// slot-end boundary.
struct Transmission {
    NodeId sender{};
    Tick start{};
    Tick duration{};
    bool control{false};
    Tick slot{};                        // sender-local slot number at emission
    std::vector<std::uint8_t> bytes;    // encoded packet

    Tick end() const { return start + duration; }
    bool overlaps(const Transmission& other) const {
        return start < other.end() && other.start < end();
    }
};

enum class LossCause : std::uint8_t { Ok = 0, Collision = 1, AdversarialOmission = 2 };

struct DeliveryOutcome {
    NodeId sender{};
    NodeId receiver{};
    Tick tx_start{};
    bool delivered{false};
    LossCause cause{LossCause::Ok};
};

// Collision resolution for the transmissions in `ended`, with `window`
// holding every transmission whose airtime can intersect one of them.
// Receiver p_j hears p_i's packet iff no node of (delta_i u delta_j) \ {p_i}
// transmits an intersecting airtime; a receiver that is itself transmitting
// concurrently loses the packet as well (half-duplex radio).
std::vector<DeliveryOutcome> resolve(std::span<const Transmission> ended,
                                     std::span<const Transmission> window,
                                     const Topology& graph);

// A point-to-point channel holding at most the most recent message.
struct Channel {
    std::optional<std::vector<std::uint8_t>> message;
};

void channel_write(Channel& q, std::vector<std::uint8_t> bytes);
void channel_omit(Channel& q);

enum class OmissionKind : std::uint8_t { None = 0, Random = 1, Targeted = 2, AlwaysWhenConcurrent = 3 };

// The adversarial omission environment, applied on top of collisions:
// none, random(p) per receiver, targeted(ids), or omit everywhere whenever
// any other transmission is concurrent.
struct OmissionPolicy {
    OmissionKind kind{OmissionKind::None};
    double probability{0.0};
    std::vector<NodeId> targets;

    // "none" | "random:0.2" | "targeted:1,2" | "always_when_concurrent"
    static OmissionPolicy parse(const std::string& text);
    std::string to_string() const;
};

// Receivers in `eligible` whose copies the environment removes in addition
// to collisions.
std::vector<NodeId> adversarial_omit(const OmissionPolicy& policy,
                                     const Transmission& tx,
                                     std::span<const NodeId> eligible,
                                     std::span<const Transmission> window,
                                     Rng& rng);

} // namespace tdma

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tdmasim/clock.hpp"
#include "tdmasim/medium.hpp"
#include "tdmasim/protocol.hpp"
#include "tdmasim/rng.hpp"
#include "tdmasim/topology.hpp"

namespace tdma {

enum class InitialCondition : std::uint8_t {
    Arbitrary = 0,          // every node state drawn by the transient-fault adversary
    RandomClocks = 1,       // pristine passive nodes with uniform clock offsets
    SynchronizedClocks = 2, // pristine passive nodes, all clocks equal
    Lemma1Blocker = 3,      // the blocking star configuration (tau = 2*delta - 1)
    Safe = 4,               // constructed safe configuration (distance-2 coloring)
};

InitialCondition parse_initial_condition(const std::string& name);
std::string to_string(InitialCondition ic);

enum class FaultScope : std::uint8_t { OneNode = 0, KNodes = 1, All = 2 };

struct FaultSpec {
    Tick frame{0};
    FaultScope scope{FaultScope::All};
    NodeId node{0};        // OneNode
    std::uint32_t count{0};// KNodes

    // "all" | "node:3" | "nodes:4"
    static FaultSpec parse_scope(Tick frame, const std::string& text);
};

struct SimConfig {
    Topology topology{Topology::grid(1, 2)};
    std::string topology_name{"grid:1x2"};
    SlotParams slots{20, 16};
    Tick clock_modulus{0};           // 0 -> xi * tau^2 * 1024
    Tick time_out{0};                // 0 -> 3 * xi * tau
    std::uint64_t two_hop_bound{0};  // 0 -> exact max |Delta_i|
    std::uint64_t node_id_bound{0};  // nu; 0 -> n + 1
    OmissionPolicy omission{};
    std::uint64_t seed{1};
    std::uint64_t max_frames{100};
    Tick jitter{0};                  // J; emission start delayed by U[0, J]
    InitialCondition initial{InitialCondition::RandomClocks};
    std::optional<FaultSpec> fault;
    bool record_events{false};

    Tick effective_modulus() const;
    Tick effective_time_out() const;
    ProtocolParams protocol_params() const;
    std::uint64_t effective_id_bound() const;

    // Throws ConfigError on hard violations (modulus not a multiple of the
    // frame length, modulus too small for the diameter, jitter >= xi/4, ...).
    void validate() const;
    // Soft regime violations, e.g. tau too small for guaranteed convergence.
    std::vector<std::string> validation_warnings() const;
};

struct NodeSnap {
    Tick clock{};
    Status status{Status::Passive};
    Tick data_slot{};
    std::uint64_t wait{};
    std::uint64_t wait_add{};
    std::vector<FrameInfoEntry> fi;
};

// All node states at a single global tick.
struct ConfigurationSnapshot {
    Tick tick{};
    std::vector<NodeSnap> nodes;
};

enum class EventKind : std::uint8_t {
    Timeslot = 0,
    Receive = 1,
    ClockAdjust = 2,
    Fault = 3,
    DecodeError = 4,
};

struct EventRecord {
    Tick tick{};
    NodeId node{};
    EventKind kind{};
    std::uint64_t a{};
    std::uint64_t b{};
    std::uint64_t state_digest{};
};

struct TransmissionRecord {
    NodeId sender{};
    Tick start{};
    Tick duration{};
    bool control{false};
    Tick slot{};
    Tick t_send{};
    std::vector<DeliveryOutcome> outcomes;   // empty while still in flight at trace end

    Tick end() const { return start + duration; }
};

// Recorded execution. Snapshots are taken at every global frame boundary
// before that tick's events; replaying the same (config, seed) reproduces
// an identical trace.
struct Trace {
    std::uint32_t node_count{};
    SlotParams slots{};
    Tick clock_modulus{};
    std::uint64_t seed{};
    std::uint64_t max_frames{};
    std::string topology_name;
    std::string initial;
    Tick jitter{};
    std::string omission;

    std::vector<ConfigurationSnapshot> snapshots;
    std::vector<TransmissionRecord> transmissions;
    std::vector<EventRecord> events;
    std::uint64_t deliveries{};
    std::uint64_t decode_errors{};

    std::uint64_t digest() const;
    void save_jsonl(std::ostream& out) const;
};

std::uint64_t state_digest(const NodeState& st);

// Initial states for the configured initial condition.
std::vector<NodeState> initial_states(const SimConfig& cfg, Rng& rng);

// The blocking star configuration: leaf p_i (i in [0, leaves-1]) is active
// with the smallest clock value whose next own-slot boundary starts exactly
// (2*xi - 1) * i ticks into the run; the center is passive with empty frame
// information. Requires tau = 2*leaves - 1.
std::vector<NodeState> lemma1_blocker_states(std::uint32_t leaves,
                                             const ProtocolParams& params);

// Replace the states in scope by adversary-drawn ones; returns the affected
// node ids in ascending order.
std::vector<NodeId> apply_fault(std::vector<NodeState>& states, const FaultSpec& fault,
                                const ProtocolParams& params, std::uint64_t id_bound,
                                Rng& rng);

// Emission start delayed by a uniform draw in [0, jitter].
Tick apply_jitter(Tick handler_tick, Tick jitter, Rng& rng);

Trace run(const SimConfig& cfg);

// Run from explicit initial states (clock moduli and FI timeouts must match
// the config). Used by scenario tests that need hand-built configurations.
Trace run_with_states(const SimConfig& cfg, std::vector<NodeState> states);

} // namespace tdma

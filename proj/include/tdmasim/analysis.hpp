#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tdmasim/engine.hpp"
#include "tdmasim/topology.hpp"

namespace tdma {
namespace analysis {

// Legality per the TDMA task: all clocks equal, and no two nodes within
// distance 2 that both hold a slot (i.e. are active) share it.
bool is_legal(const ConfigurationSnapshot& snap, const Topology& graph);

// Safety: (1) clocks synchronized, (2) every node active, (3) slots
// distance-2 distinct, (4) every node's frame information holds exactly one
// msg entry for each member of its two-hop neighborhood and for itself.
// Condition (4) is evaluated against the exact neighborhoods of the graph.
bool is_safe(const ConfigurationSnapshot& snap, const Topology& graph);

// First frame index f such that the snapshot at f is safe and every
// snapshot from f to the end of the trace is legal (convergence plus
// closure over the observed suffix); absent if no such frame exists.
std::optional<std::uint64_t> convergence_frame(const Trace& trace, const Topology& graph);

// Delivery outcomes lost to collisions among transmissions starting in
// frames [frame_lo, frame_hi).
std::uint64_t collision_count(const Trace& trace, std::uint64_t frame_lo,
                              std::uint64_t frame_hi);

struct CoverageResult {
    std::size_t intersected;   // partition elements intersected by the intervals
    std::size_t bound;         // 2 * |C|
};

// Oracle for the interval-coverage bound: how many elements of the
// partition of [0, xi*tau) into tau slots of width xi are intersected by
// the given xi-length intervals. The count never exceeds 2 * |C|.
CoverageResult interval_coverage_bound(std::span<const double> interval_starts,
                                       double xi, std::uint64_t tau);

struct ControlRateReport {
    std::uint64_t stretch_count{};                       // full tau-frame stretches examined
    std::vector<std::vector<std::uint64_t>> per_node;    // [node][stretch] control packets
    bool one_per_tau{};            // every node sent exactly one per stretch
    bool own_frame_only{};         // every control packet fell in a frame matching the
                                   // sender's slot number (senders active at the time)
    bool ball_unique_per_frame{};  // <= 1 control packet per 2-hop ball per frame
};

// Control-packet accounting over the post-convergence window [frame_lo,
// frame_hi). Throws std::invalid_argument when the window starts before the
// trace's convergence frame (or the trace never converged).
ControlRateReport control_packet_rate(const Trace& trace, const Topology& graph,
                                      std::uint64_t frame_lo, std::uint64_t frame_hi);

// CSV metrics row for one run: seed, n, topology, tau, xi, convergence
// frame (empty when absent), total collisions, collisions at and after the
// convergence frame.
std::string csv_header();
std::string csv_row(const Trace& trace, const Topology& graph);

} // namespace analysis
} // namespace tdma

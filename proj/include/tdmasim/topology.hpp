#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tdmasim/clock.hpp"
#include "tdmasim/rng.hpp"

namespace tdma {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Undirected, irreflexive communication graph. Immutable after construction;
// two-hop neighborhoods are precomputed.
class Topology {
public:
    static Topology star(std::uint32_t leaves);
    static Topology grid(std::uint32_t width, std::uint32_t height);
    static Topology unit_disk(std::uint32_t n, double radius, double side, Rng& rng,
                              std::uint32_t degree_cap = 16,
                              std::uint32_t max_attempts = 500);
    static Topology from_edges(std::uint32_t n,
                               const std::vector<std::pair<NodeId, NodeId>>& edges);
    // Edge-list text format: first line "n m", then m lines "u v" (0-indexed).
    static Topology from_edge_list(std::istream& in);

    void save_edge_list(std::ostream& out) const;

    std::uint32_t node_count() const { return static_cast<std::uint32_t>(adj_.size()); }
    std::uint64_t edge_count() const;
    std::span<const NodeId> neighbors(NodeId v) const { return adj_.at(v); }
    // The two-hop neighborhood: nodes at distance 1 or 2, excluding v.
    std::span<const NodeId> two_hop(NodeId v) const { return two_hop_.at(v); }
    bool adjacent(NodeId a, NodeId b) const;
    bool connected() const;

    struct Metrics {
        std::uint64_t degree_bound;   // max |delta_i|
        std::uint64_t two_hop_bound;  // max |Delta_i|
        std::uint64_t diameter;
    };
    // Exact maxima via BFS from every node. Throws on a disconnected graph.
    Metrics metrics() const;

    // Exact chromatic number of the square graph (distance-2 coloring) by
    // branch and bound. Only for n <= 20; larger graphs should use the
    // greedy upper bound below.
    std::uint32_t chromatic_number_distance2() const;

    // Greedy distance-2 coloring in node order; returns per-node colors and
    // the number of colors used (an upper bound X2 >= chi_2).
    std::vector<Tick> greedy_distance2_coloring(std::uint32_t* colors_used = nullptr) const;

private:
    explicit Topology(std::uint32_t n) : adj_(n) {}
    void finalize();
    std::vector<std::uint32_t> bfs_distances(NodeId source) const;

    std::vector<std::vector<NodeId>> adj_;
    std::vector<std::vector<NodeId>> two_hop_;
};

} // namespace tdma

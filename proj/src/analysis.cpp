#include "tdmasim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tdma {
namespace analysis {

bool is_legal(const ConfigurationSnapshot& snap, const Topology& graph) {
    if (snap.nodes.empty()) return true;
    const Tick clock0 = snap.nodes[0].clock;
    for (const auto& n : snap.nodes)
        if (n.clock != clock0) return false;
    for (NodeId i = 0; i < snap.nodes.size(); ++i) {
        if (snap.nodes[i].status != Status::Active) continue;
        for (NodeId j : graph.two_hop(i)) {
            if (snap.nodes[j].status != Status::Active) continue;
            if (snap.nodes[i].data_slot == snap.nodes[j].data_slot) return false;
        }
    }
    return true;
}

bool is_safe(const ConfigurationSnapshot& snap, const Topology& graph) {
    if (snap.nodes.empty()) return false;
    const Tick clock0 = snap.nodes[0].clock;
    for (const auto& n : snap.nodes) {
        if (n.clock != clock0) return false;
        if (n.status != Status::Active) return false;
    }
    for (NodeId i = 0; i < snap.nodes.size(); ++i)
        for (NodeId j : graph.two_hop(i))
            if (snap.nodes[i].data_slot == snap.nodes[j].data_slot) return false;
    for (NodeId i = 0; i < snap.nodes.size(); ++i) {
        auto msg_count = [&](NodeId id) {
            std::size_t k = 0;
            for (const auto& e : snap.nodes[i].fi)
                if (e.id == id && e.kind == EntryKind::Msg) ++k;
            return k;
        };
        if (msg_count(i) != 1) return false;
        for (NodeId j : graph.two_hop(i))
            if (msg_count(j) != 1) return false;
    }
    return true;
}

std::optional<std::uint64_t> convergence_frame(const Trace& trace, const Topology& graph) {
    const auto& snaps = trace.snapshots;
    if (snaps.empty()) return std::nullopt;
    // Longest legal suffix first, then the earliest safe snapshot inside it.
    std::size_t suffix_start = snaps.size();
    while (suffix_start > 0 && is_legal(snaps[suffix_start - 1], graph)) --suffix_start;
    for (std::size_t f = suffix_start; f < snaps.size(); ++f)
        if (is_safe(snaps[f], graph)) return f;
    return std::nullopt;
}

std::uint64_t collision_count(const Trace& trace, std::uint64_t frame_lo,
                              std::uint64_t frame_hi) {
    const Tick frame = trace.slots.frame_ticks();
    const Tick lo = frame_lo * frame;
    const Tick hi = frame_hi * frame;
    std::uint64_t count = 0;
    for (const auto& tx : trace.transmissions) {
        if (tx.start < lo || tx.start >= hi) continue;
        for (const auto& o : tx.outcomes)
            if (!o.delivered && o.cause == LossCause::Collision) ++count;
    }
    return count;
}

CoverageResult interval_coverage_bound(std::span<const double> interval_starts,
                                       double xi, std::uint64_t tau) {
    CoverageResult res{0, 2 * interval_starts.size()};
    for (std::uint64_t a = 0; a < tau; ++a) {
        const double lo = double(a) * xi;
        const double hi = double(a + 1) * xi;
        for (double b : interval_starts) {
            if (b < hi && lo < b + xi) {
                ++res.intersected;
                break;
            }
        }
    }
    return res;
}

ControlRateReport control_packet_rate(const Trace& trace, const Topology& graph,
                                      std::uint64_t frame_lo, std::uint64_t frame_hi) {
    const auto conv = convergence_frame(trace, graph);
    if (!conv || frame_lo < *conv)
        throw std::invalid_argument("control_packet_rate: window starts before convergence");

    const Tick frame = trace.slots.frame_ticks();
    const std::uint64_t tau = trace.slots.tau;
    ControlRateReport rep;
    rep.stretch_count = (frame_hi - frame_lo) / tau;
    rep.per_node.assign(trace.node_count,
                        std::vector<std::uint64_t>(rep.stretch_count, 0));
    rep.one_per_tau = true;
    rep.own_frame_only = true;
    rep.ball_unique_per_frame = true;

    // frame -> senders of control packets in it, for the per-ball check
    std::vector<std::vector<NodeId>> senders_by_frame(frame_hi - frame_lo);

    for (const auto& tx : trace.transmissions) {
        if (!tx.control) continue;
        const std::uint64_t f = tx.start / frame;
        if (f < frame_lo || f >= frame_hi) continue;
        const std::uint64_t stretch = (f - frame_lo) / tau;
        if (stretch < rep.stretch_count) rep.per_node[tx.sender][stretch] += 1;
        senders_by_frame[f - frame_lo].push_back(tx.sender);
        // The sender's local frame number at emission must match its data
        // slot (active nodes run the control machinery in their own frame
        // only; slots are stable after convergence).
        if (f < trace.snapshots.size() &&
            frame_of(tx.t_send, trace.slots) != trace.snapshots[f].nodes[tx.sender].data_slot)
            rep.own_frame_only = false;
    }

    for (const auto& counts : rep.per_node)
        for (std::uint64_t c : counts)
            if (c != 1) rep.one_per_tau = false;

    for (const auto& senders : senders_by_frame) {
        for (std::size_t a = 0; a < senders.size(); ++a) {
            for (std::size_t b = a + 1; b < senders.size(); ++b) {
                const NodeId u = senders[a], v = senders[b];
                if (u == v) {
                    rep.ball_unique_per_frame = false;
                    continue;
                }
                const auto th = graph.two_hop(u);
                if (std::find(th.begin(), th.end(), v) != th.end())
                    rep.ball_unique_per_frame = false;
            }
        }
    }
    return rep;
}

std::string csv_header() {
    return "row,topology,n,xi,tau,seed,frames,converged,convergence_frame,"
           "collisions_total,collisions_post_convergence";
}

std::string csv_row(const Trace& trace, const Topology& graph) {
    const auto conv = convergence_frame(trace, graph);
    const std::uint64_t total = collision_count(trace, 0, trace.max_frames);
    std::ostringstream out;
    out << "run," << trace.topology_name << ',' << trace.node_count << ','
        << trace.slots.xi << ',' << trace.slots.tau << ',' << trace.seed << ','
        << trace.max_frames << ',' << (conv ? 1 : 0) << ',';
    if (conv) out << *conv;
    out << ',' << total << ',';
    if (conv)
        out << collision_count(trace, *conv, trace.max_frames);
    return out.str();
}

} // namespace analysis
} // namespace tdma

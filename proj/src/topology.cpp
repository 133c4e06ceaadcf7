#include "tdmasim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

namespace tdma {

namespace {

constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

} // namespace

Topology Topology::star(std::uint32_t leaves) {
    if (leaves < 1) throw ConfigError("star: need at least one leaf");
    Topology g(leaves + 1);
    const NodeId center = leaves;
    for (NodeId i = 0; i < leaves; ++i) {
        g.adj_[center].push_back(i);
        g.adj_[i].push_back(center);
    }
    g.finalize();
    return g;
}

Topology Topology::grid(std::uint32_t width, std::uint32_t height) {
    if (width < 1 || height < 1) throw ConfigError("grid: dimensions must be positive");
    Topology g(width * height);
    auto at = [width](std::uint32_t x, std::uint32_t y) { return y * width + x; };
    for (std::uint32_t y = 0; y < height; ++y) {
        for (std::uint32_t x = 0; x < width; ++x) {
            if (x + 1 < width) {
                g.adj_[at(x, y)].push_back(at(x + 1, y));
                g.adj_[at(x + 1, y)].push_back(at(x, y));
            }
            if (y + 1 < height) {
                g.adj_[at(x, y)].push_back(at(x, y + 1));
                g.adj_[at(x, y + 1)].push_back(at(x, y));
            }
        }
    }
    g.finalize();
    return g;
}

Topology Topology::unit_disk(std::uint32_t n, double radius, double side, Rng& rng,
                             std::uint32_t degree_cap, std::uint32_t max_attempts) {
    if (n < 1) throw ConfigError("unit_disk: need at least one node");
    if (radius <= 0.0 || side <= 0.0) throw ConfigError("unit_disk: radius and side must be positive");
    for (std::uint32_t attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<std::pair<double, double>> pts(n);
        for (auto& p : pts) {
            p.first = rng.unit() * side;
            p.second = rng.unit() * side;
        }
        Topology g(n);
        bool degree_ok = true;
        for (NodeId i = 0; i < n && degree_ok; ++i) {
            for (NodeId j = i + 1; j < n; ++j) {
                const double dx = pts[i].first - pts[j].first;
                const double dy = pts[i].second - pts[j].second;
                if (dx * dx + dy * dy <= radius * radius) {
                    g.adj_[i].push_back(j);
                    g.adj_[j].push_back(i);
                    if (g.adj_[i].size() > degree_cap || g.adj_[j].size() > degree_cap) {
                        degree_ok = false;
                        break;
                    }
                }
            }
        }
        if (!degree_ok) continue;
        g.finalize();
        if (g.connected()) return g;
    }
    throw ConfigError("unit_disk: no connected placement within the degree cap after " +
                      std::to_string(max_attempts) + " attempts");
}

Topology Topology::from_edges(std::uint32_t n,
                              const std::vector<std::pair<NodeId, NodeId>>& edges) {
    Topology g(n);
    for (auto [u, v] : edges) {
        if (u >= n || v >= n) throw ConfigError("edge endpoint out of range");
        if (u == v) throw ConfigError("self loops are not allowed");
        if (g.adjacent(u, v)) continue;
        g.adj_[u].push_back(v);
        g.adj_[v].push_back(u);
    }
    g.finalize();
    return g;
}

Topology Topology::from_edge_list(std::istream& in) {
    std::uint64_t n = 0, m = 0;
    if (!(in >> n >> m)) throw ConfigError("edge list: missing 'n m' header");
    if (n == 0 || n > 1'000'000) throw ConfigError("edge list: bad node count");
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(m);
    for (std::uint64_t k = 0; k < m; ++k) {
        std::uint64_t u = 0, v = 0;
        if (!(in >> u >> v)) throw ConfigError("edge list: truncated edge list");
        edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
    return from_edges(static_cast<std::uint32_t>(n), edges);
}

void Topology::save_edge_list(std::ostream& out) const {
    out << node_count() << ' ' << edge_count() << '\n';
    for (NodeId u = 0; u < node_count(); ++u)
        for (NodeId v : adj_[u])
            if (u < v) out << u << ' ' << v << '\n';
}

std::uint64_t Topology::edge_count() const {
    std::uint64_t twice = 0;
    for (const auto& nbrs : adj_) twice += nbrs.size();
    return twice / 2;
}

bool Topology::adjacent(NodeId a, NodeId b) const {
    const auto& nbrs = adj_.at(a);
    return std::find(nbrs.begin(), nbrs.end(), b) != nbrs.end();
}

void Topology::finalize() {
    for (auto& nbrs : adj_) std::sort(nbrs.begin(), nbrs.end());
    two_hop_.assign(adj_.size(), {});
    for (NodeId v = 0; v < adj_.size(); ++v) {
        std::set<NodeId> reach;
        for (NodeId u : adj_[v]) {
            reach.insert(u);
            for (NodeId w : adj_[u]) reach.insert(w);
        }
        reach.erase(v);
        two_hop_[v].assign(reach.begin(), reach.end());
    }
}

std::vector<std::uint32_t> Topology::bfs_distances(NodeId source) const {
    std::vector<std::uint32_t> dist(adj_.size(), kUnreached);
    std::queue<NodeId> q;
    dist[source] = 0;
    q.push(source);
    while (!q.empty()) {
        const NodeId v = q.front();
        q.pop();
        for (NodeId u : adj_[v]) {
            if (dist[u] == kUnreached) {
                dist[u] = dist[v] + 1;
                q.push(u);
            }
        }
    }
    return dist;
}

bool Topology::connected() const {
    if (adj_.empty()) return false;
    const auto dist = bfs_distances(0);
    return std::none_of(dist.begin(), dist.end(),
                        [](std::uint32_t d) { return d == kUnreached; });
}

Topology::Metrics Topology::metrics() const {
    if (!connected()) throw ConfigError("metrics: graph is disconnected");
    Metrics m{0, 0, 0};
    for (NodeId v = 0; v < node_count(); ++v) {
        m.degree_bound = std::max<std::uint64_t>(m.degree_bound, adj_[v].size());
        m.two_hop_bound = std::max<std::uint64_t>(m.two_hop_bound, two_hop_[v].size());
        const auto dist = bfs_distances(v);
        for (std::uint32_t d : dist) m.diameter = std::max<std::uint64_t>(m.diameter, d);
    }
    return m;
}

namespace {

// Adjacency of the square graph G^2 as bitmasks (n <= 64).
std::vector<std::uint64_t> square_masks(const Topology& g) {
    std::vector<std::uint64_t> mask(g.node_count(), 0);
    for (NodeId v = 0; v < g.node_count(); ++v)
        for (NodeId u : g.two_hop(v)) mask[v] |= std::uint64_t(1) << u;
    return mask;
}

struct ColorSearch {
    const std::vector<std::uint64_t>& mask;
    const std::vector<NodeId>& order;
    std::vector<std::uint32_t> color;
    std::uint32_t best;

    bool feasible(std::size_t idx, std::uint32_t limit) {
        if (idx == order.size()) return true;
        const NodeId v = order[idx];
        std::uint64_t taken = 0;
        for (NodeId u = 0; u < color.size(); ++u)
            if (color[u] != 0 && (mask[v] >> u & 1)) taken |= std::uint64_t(1) << (color[u] - 1);
        for (std::uint32_t c = 1; c <= limit; ++c) {
            if (taken >> (c - 1) & 1) continue;
            color[v] = c;
            if (feasible(idx + 1, limit)) return true;
            color[v] = 0;
            // Trying a color beyond the current maximum more than once only
            // permutes color names; stop at the first untouched color.
            if (c > max_used()) break;
        }
        return false;
    }

    std::uint32_t max_used() const {
        std::uint32_t m = 0;
        for (std::uint32_t c : color) m = std::max(m, c);
        return m;
    }
};

} // namespace

std::uint32_t Topology::chromatic_number_distance2() const {
    const std::uint32_t n = node_count();
    if (n > 20)
        throw ConfigError("chromatic_number_distance2: exact search is limited to 20 nodes; "
                          "use greedy_distance2_coloring for an upper bound");
    if (n == 1) return 1;

    const auto mask = square_masks(*this);
    std::vector<NodeId> order(n);
    for (NodeId v = 0; v < n; ++v) order[v] = v;
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        return two_hop_[a].size() > two_hop_[b].size();
    });

    std::uint32_t upper = 0;
    greedy_distance2_coloring(&upper);
    // A closed neighborhood {v} + delta_v is a clique in G^2: the members are
    // pairwise within two hops of each other via v. Its size lower-bounds chi_2.
    std::uint32_t lower = 1;
    for (NodeId v = 0; v < n; ++v)
        lower = std::max<std::uint32_t>(lower, static_cast<std::uint32_t>(adj_[v].size()) + 1);

    for (std::uint32_t k = lower; k < upper; ++k) {
        ColorSearch search{mask, order, std::vector<std::uint32_t>(n, 0), upper};
        if (search.feasible(0, k)) return k;
    }
    return upper;
}

std::vector<Tick> Topology::greedy_distance2_coloring(std::uint32_t* colors_used) const {
    const std::uint32_t n = node_count();
    std::vector<Tick> color(n, 0);
    std::vector<bool> assigned(n, false);
    std::uint32_t used = 0;
    for (NodeId v = 0; v < n; ++v) {
        std::set<Tick> taken;
        for (NodeId u : two_hop_[v])
            if (assigned[u]) taken.insert(color[u]);
        Tick c = 0;
        while (taken.contains(c)) ++c;
        color[v] = c;
        assigned[v] = true;
        used = std::max<std::uint32_t>(used, static_cast<std::uint32_t>(c) + 1);
    }
    if (colors_used) *colors_used = used;
    return color;
}

} // namespace tdma

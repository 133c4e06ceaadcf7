#include "tdmasim/engine.hpp"

#include <algorithm>
#include <cassert>
#include <ostream>
#include <set>

#include "json.hpp"

#include "tdmasim/wire.hpp"

namespace tdma {

InitialCondition parse_initial_condition(const std::string& name) {
    if (name == "arbitrary") return InitialCondition::Arbitrary;
    if (name == "random_clocks") return InitialCondition::RandomClocks;
    if (name == "synchronized_clocks") return InitialCondition::SynchronizedClocks;
    if (name == "lemma1_blocker") return InitialCondition::Lemma1Blocker;
    if (name == "safe") return InitialCondition::Safe;
    throw ConfigError("unknown initial condition '" + name + "'");
}

std::string to_string(InitialCondition ic) {
    switch (ic) {
        case InitialCondition::Arbitrary: return "arbitrary";
        case InitialCondition::RandomClocks: return "random_clocks";
        case InitialCondition::SynchronizedClocks: return "synchronized_clocks";
        case InitialCondition::Lemma1Blocker: return "lemma1_blocker";
        case InitialCondition::Safe: return "safe";
    }
    return "?";
}

FaultSpec FaultSpec::parse_scope(Tick frame, const std::string& text) {
    FaultSpec f;
    f.frame = frame;
    if (text == "all") {
        f.scope = FaultScope::All;
        return f;
    }
    if (text.rfind("node:", 0) == 0) {
        f.scope = FaultScope::OneNode;
        f.node = static_cast<NodeId>(std::stoul(text.substr(5)));
        return f;
    }
    if (text.rfind("nodes:", 0) == 0) {
        f.scope = FaultScope::KNodes;
        f.count = static_cast<std::uint32_t>(std::stoul(text.substr(6)));
        return f;
    }
    throw ConfigError("unknown fault scope '" + text + "'");
}

Tick SimConfig::effective_modulus() const {
    return clock_modulus != 0 ? clock_modulus
                              : slots.xi * slots.tau * slots.tau * 1024;
}

Tick SimConfig::effective_time_out() const {
    return time_out != 0 ? time_out : 3 * slots.xi * slots.tau;
}

std::uint64_t SimConfig::effective_id_bound() const {
    return node_id_bound != 0 ? node_id_bound : topology.node_count() + 1;
}

ProtocolParams SimConfig::protocol_params() const {
    ProtocolParams p;
    p.slots = slots;
    p.clock_modulus = effective_modulus();
    p.time_out = effective_time_out();
    p.two_hop_bound = two_hop_bound != 0 ? two_hop_bound
                                         : topology.metrics().two_hop_bound;
    return p;
}

void SimConfig::validate() const {
    if (slots.xi < 1 || slots.tau < 1)
        throw ConfigError("slot parameters must be positive");
    if (!topology.connected())
        throw ConfigError("communication graph must be connected");
    const auto m = topology.metrics();
    const Tick c = effective_modulus();
    if (c % slots.frame_ticks() != 0)
        throw ConfigError("clock modulus must be a multiple of xi*tau");
    if (c < 8 * m.diameter * slots.tau * slots.tau)
        throw ConfigError("clock modulus too small: need c >> diam * tau^2");
    const Tick to = effective_time_out();
    if (to == 0 || to >= c / 2)
        throw ConfigError("time_out must lie in (0, c/2)");
    if (jitter != 0 && jitter >= slots.xi / 4)
        throw ConfigError("jitter must be below xi/4");
    if (two_hop_bound != 0 && two_hop_bound < m.two_hop_bound)
        throw ConfigError("two_hop_bound below the graph's actual value");
    if (node_id_bound != 0 && node_id_bound <= topology.node_count())
        throw ConfigError("node_id_bound must exceed the node count");
    if (fault && fault->scope == FaultScope::OneNode && fault->node >= topology.node_count())
        throw ConfigError("fault node out of range");
    // Trace-size cap: snapshots grow with frames * nodes, events with
    // frames * tau * nodes.
    const std::uint64_t snapshot_cells = (max_frames + 1) * topology.node_count();
    const std::uint64_t event_cells =
        record_events ? max_frames * slots.tau * topology.node_count() : 0;
    if (snapshot_cells > 200'000'000ull || event_cells > 200'000'000ull)
        throw ConfigError("trace would exceed the recording cap; lower max_frames "
                          "or disable event recording");
    if (initial == InitialCondition::Lemma1Blocker) {
        const std::uint32_t leaves = topology.node_count() - 1;
        if (slots.tau != 2 * std::uint64_t(leaves) - 1)
            throw ConfigError("lemma1_blocker requires tau = 2*leaves - 1 on a star");
    }
}

std::vector<std::string> SimConfig::validation_warnings() const {
    std::vector<std::string> out;
    const auto m = topology.metrics();
    const bool local_free = slots.tau > std::max<std::uint64_t>(4 * m.degree_bound,
                                                                m.two_hop_bound + 1);
    const bool period_free = slots.tau > 2 * m.two_hop_bound;
    if (!local_free && !period_free)
        out.push_back("tau=" + std::to_string(slots.tau) +
                      " satisfies neither tau > max{4*delta, Delta+1} nor tau > 2*Delta" +
                      " (delta=" + std::to_string(m.degree_bound) +
                      ", Delta=" + std::to_string(m.two_hop_bound) +
                      "); convergence is not guaranteed");
    return out;
}

namespace {

struct Fnv {
    std::uint64_t h{1469598103934665603ull};

    void add(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= v >> (8 * i) & 0xff;
            h *= 1099511628211ull;
        }
    }
};

} // namespace

std::uint64_t state_digest(const NodeState& st) {
    Fnv f;
    f.add(st.id);
    f.add(st.status == Status::Active ? 1 : 0);
    f.add(st.data_slot);
    f.add(st.wait);
    f.add(st.wait_add);
    f.add(st.clock.value);
    for (const auto& e : st.fi.entries) {
        f.add(e.id);
        f.add(static_cast<std::uint64_t>(e.kind));
        f.add(static_cast<std::uint64_t>(e.occurrence));
        f.add(e.rx_time);
    }
    return f.h;
}

std::uint64_t Trace::digest() const {
    Fnv f;
    f.add(node_count);
    f.add(slots.xi);
    f.add(slots.tau);
    f.add(clock_modulus);
    f.add(seed);
    f.add(max_frames);
    for (const auto& snap : snapshots) {
        f.add(snap.tick);
        for (const auto& n : snap.nodes) {
            f.add(n.clock);
            f.add(n.status == Status::Active ? 1 : 0);
            f.add(n.data_slot);
            f.add(n.wait);
            f.add(n.wait_add);
            for (const auto& e : n.fi) {
                f.add(e.id);
                f.add(static_cast<std::uint64_t>(e.kind));
                f.add(static_cast<std::uint64_t>(e.occurrence));
                f.add(e.rx_time);
            }
        }
    }
    for (const auto& tx : transmissions) {
        f.add(tx.sender);
        f.add(tx.start);
        f.add(tx.duration);
        f.add(tx.control ? 1 : 0);
        f.add(tx.slot);
        f.add(tx.t_send);
        for (const auto& o : tx.outcomes) {
            f.add(o.receiver);
            f.add(o.delivered ? 1 : 0);
            f.add(static_cast<std::uint64_t>(o.cause));
        }
    }
    for (const auto& e : events) {
        f.add(e.tick);
        f.add(e.node);
        f.add(static_cast<std::uint64_t>(e.kind));
        f.add(e.a);
        f.add(e.b);
        f.add(e.state_digest);
    }
    f.add(deliveries);
    f.add(decode_errors);
    return f.h;
}

namespace {

const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::Timeslot: return "timeslot";
        case EventKind::Receive: return "receive";
        case EventKind::ClockAdjust: return "clock_adjust";
        case EventKind::Fault: return "fault";
        case EventKind::DecodeError: return "decode_error";
    }
    return "?";
}

const char* cause_name(LossCause c) {
    switch (c) {
        case LossCause::Ok: return "ok";
        case LossCause::Collision: return "collision";
        case LossCause::AdversarialOmission: return "adversarial_omission";
    }
    return "?";
}

} // namespace

void Trace::save_jsonl(std::ostream& out) const {
    using nlohmann::json;
    json meta = {
        {"type", "meta"},         {"nodes", node_count},
        {"xi", slots.xi},         {"tau", slots.tau},
        {"clock_modulus", clock_modulus}, {"seed", seed},
        {"max_frames", max_frames}, {"topology", topology_name},
        {"initial", initial},     {"jitter", jitter},
        {"omission", omission},   {"deliveries", deliveries},
        {"decode_errors", decode_errors},
    };
    out << meta.dump() << '\n';
    for (const auto& snap : snapshots) {
        json nodes = json::array();
        for (const auto& n : snap.nodes) {
            json fi = json::array();
            for (const auto& e : n.fi)
                fi.push_back({e.id, static_cast<int>(e.kind),
                              static_cast<int>(e.occurrence), e.rx_time});
            nodes.push_back({{"clock", n.clock},
                             {"status", n.status == Status::Active ? "act" : "psv"},
                             {"slot", n.data_slot},
                             {"wait", n.wait},
                             {"fi", std::move(fi)}});
        }
        out << json{{"type", "snapshot"},
                    {"frame", snap.tick / slots.frame_ticks()},
                    {"tick", snap.tick},
                    {"nodes", std::move(nodes)}}
                   .dump()
            << '\n';
    }
    for (const auto& tx : transmissions) {
        json outcomes = json::array();
        for (const auto& o : tx.outcomes)
            outcomes.push_back({{"to", o.receiver},
                                {"delivered", o.delivered},
                                {"cause", cause_name(o.cause)}});
        out << json{{"type", "tx"},
                    {"sender", tx.sender},
                    {"start", tx.start},
                    {"end", tx.end()},
                    {"control", tx.control},
                    {"slot", tx.slot},
                    {"t_send", tx.t_send},
                    {"outcomes", std::move(outcomes)}}
                   .dump()
            << '\n';
    }
    for (const auto& e : events) {
        out << json{{"type", "event"},
                    {"tick", e.tick},
                    {"node", e.node},
                    {"kind", event_kind_name(e.kind)},
                    {"a", e.a},
                    {"b", e.b},
                    {"digest", e.state_digest}}
                   .dump()
            << '\n';
    }
}

std::vector<NodeState> lemma1_blocker_states(std::uint32_t leaves,
                                             const ProtocolParams& params) {
    if (params.slots.tau != 2 * std::uint64_t(leaves) - 1)
        throw ConfigError("lemma1_blocker: requires tau = 2*leaves - 1");
    const Tick xi = params.slots.xi;
    const Tick c = params.clock_modulus;
    std::vector<NodeState> states(leaves + 1);
    for (std::uint32_t i = 0; i < leaves; ++i) {
        const Tick gap = (2 * xi - 1) * i;     // ticks until p_i's slot starts
        NodeState& st = states[i];
        st.id = i;
        st.status = Status::Active;
        st.clock = {(xi - gap % xi) % xi, c};
        st.data_slot = slot_of(st.clock.value + gap, params.slots);
        st.fi.time_out = params.time_out;
    }
    NodeState& center = states[leaves];
    center.id = leaves;
    center.status = Status::Passive;
    center.clock = {0, c};
    center.fi.time_out = params.time_out;
    return states;
}

std::vector<NodeState> initial_states(const SimConfig& cfg, Rng& rng) {
    const ProtocolParams params = cfg.protocol_params();
    const Tick c = params.clock_modulus;
    const std::uint32_t n = cfg.topology.node_count();
    std::vector<NodeState> states(n);

    auto pristine = [&](NodeId i) {
        NodeState st;
        st.id = i;
        st.status = Status::Passive;
        st.clock = {0, c};
        st.fi.time_out = params.time_out;
        st.wait = rng.uniform(0, 3 * params.two_hop_bound - 1);
        return st;
    };

    switch (cfg.initial) {
        case InitialCondition::Arbitrary:
            for (NodeId i = 0; i < n; ++i)
                states[i] = arbitrary_state(i, params, cfg.effective_id_bound(), rng);
            break;
        case InitialCondition::RandomClocks:
            for (NodeId i = 0; i < n; ++i) {
                states[i] = pristine(i);
                states[i].clock.value = rng.uniform(0, c - 1);
            }
            break;
        case InitialCondition::SynchronizedClocks:
            for (NodeId i = 0; i < n; ++i) states[i] = pristine(i);
            break;
        case InitialCondition::Lemma1Blocker:
            return lemma1_blocker_states(n - 1, params);
        case InitialCondition::Safe: {
            std::uint32_t colors = 0;
            const auto coloring = cfg.topology.greedy_distance2_coloring(&colors);
            if (colors > params.slots.tau)
                throw ConfigError("safe initial condition: the distance-2 coloring needs " +
                                  std::to_string(colors) + " slots but tau is " +
                                  std::to_string(params.slots.tau));
            const Tick frame = params.slots.frame_ticks();
            for (NodeId i = 0; i < n; ++i) {
                NodeState st;
                st.id = i;
                st.status = Status::Active;
                st.clock = {0, c};
                st.data_slot = coloring[i];
                st.fi.time_out = params.time_out;
                // One msg entry per two-hop member and for the node itself,
                // stamped with that node's most recent data slot start.
                auto stamp = [&](NodeId j) {
                    return mod_sub(coloring[j] * params.slots.xi, frame, c);
                };
                for (NodeId j : cfg.topology.neighbors(i))
                    st.fi.entries.push_back({j, EntryKind::Msg, Occurrence::Local, stamp(j)});
                for (NodeId j : cfg.topology.two_hop(i))
                    if (!cfg.topology.adjacent(i, j))
                        st.fi.entries.push_back({j, EntryKind::Msg, Occurrence::Remote, stamp(j)});
                st.fi.entries.push_back({i, EntryKind::Msg, Occurrence::Remote, stamp(i)});
                states[i] = st;
            }
            break;
        }
    }
    return states;
}

std::vector<NodeId> apply_fault(std::vector<NodeState>& states, const FaultSpec& fault,
                                const ProtocolParams& params, std::uint64_t id_bound,
                                Rng& rng) {
    std::vector<NodeId> affected;
    const std::uint32_t n = static_cast<std::uint32_t>(states.size());
    switch (fault.scope) {
        case FaultScope::OneNode:
            affected.push_back(fault.node);
            break;
        case FaultScope::KNodes: {
            std::set<NodeId> picked;
            const std::uint32_t want = std::min(fault.count, n);
            while (picked.size() < want)
                picked.insert(static_cast<NodeId>(rng.uniform(0, n - 1)));
            affected.assign(picked.begin(), picked.end());
            break;
        }
        case FaultScope::All:
            for (NodeId i = 0; i < n; ++i) affected.push_back(i);
            break;
    }
    for (NodeId i : affected)
        states[i] = arbitrary_state(i, params, id_bound, rng);
    return affected;
}

Tick apply_jitter(Tick handler_tick, Tick jitter, Rng& rng) {
    if (jitter == 0) return handler_tick;
    return handler_tick + rng.uniform(0, jitter);
}

namespace {

// A transmission in flight, carrying the per-receiver timestamps captured at
// the scheduled transmit-start instant.
struct LiveTransmission {
    Transmission tx;
    Tick t_send{};
    std::vector<std::pair<NodeId, Tick>> t_recv;
    std::size_t record{};   // index into Trace::transmissions
};

class Simulation {
public:
    Simulation(const SimConfig& cfg, std::vector<NodeState> states, Rng rng)
        : cfg_(cfg),
          params_(cfg.protocol_params()),
          c_(params_.clock_modulus),
          states_(std::move(states)),
          rng_(std::move(rng)) {
        const std::uint32_t n = cfg_.topology.node_count();
        if (states_.size() != n)
            throw ConfigError("initial states do not match the topology size");
        for (const auto& st : states_) {
            if (st.clock.modulus != c_)
                throw ConfigError("initial state clock modulus does not match the config");
            if (st.fi.time_out != params_.time_out)
                throw ConfigError("initial state frame-information timeout does not match");
        }
        offsets_.resize(n);
        for (NodeId i = 0; i < n; ++i) offsets_[i] = states_[i].clock.value % c_;
        seq_.assign(n, 0);
        channels_.assign(std::size_t(n) * n, Channel{});

        trace_.node_count = n;
        trace_.slots = cfg_.slots;
        trace_.clock_modulus = c_;
        trace_.seed = cfg_.seed;
        trace_.max_frames = cfg_.max_frames;
        trace_.topology_name = cfg_.topology_name;
        trace_.initial = to_string(cfg_.initial);
        trace_.jitter = cfg_.jitter;
        trace_.omission = cfg_.omission.to_string();
    }

    Trace run() {
        const Tick frame = cfg_.slots.frame_ticks();
        const Tick horizon = cfg_.max_frames * frame;
        for (Tick g = 0;; ++g) {
            if (g % frame == 0) snapshot(g);
            if (g == horizon) break;
            if (cfg_.fault && g == cfg_.fault->frame * frame) inject_fault(g);
            deliver(g);
            boundaries(g);
        }
        return std::move(trace_);
    }

private:
    Tick clock_at(NodeId i, Tick g) const { return (g + offsets_[i]) % c_; }

    void sync_clock(NodeId i, Tick g) { states_[i].clock.value = clock_at(i, g); }

    void resync_offset(NodeId i, Tick g) {
        offsets_[i] = mod_sub(states_[i].clock.value, g % c_, c_);
    }

    void snapshot(Tick g) {
        ConfigurationSnapshot snap;
        snap.tick = g;
        snap.nodes.reserve(states_.size());
        for (NodeId i = 0; i < states_.size(); ++i) {
            const NodeState& st = states_[i];
            snap.nodes.push_back({clock_at(i, g), st.status, st.data_slot, st.wait,
                                  st.wait_add, st.fi.entries});
        }
        trace_.snapshots.push_back(std::move(snap));
    }

    void inject_fault(Tick g) {
        const auto affected = apply_fault(states_, *cfg_.fault, params_,
                                          cfg_.effective_id_bound(), rng_);
        for (NodeId i : affected) {
            resync_offset(i, g);
            // Corrupting a node also wipes what it has on the air.
            std::erase_if(live_, [i](const LiveTransmission& lt) {
                return lt.tx.sender == i;
            });
            for (NodeId r = 0; r < states_.size(); ++r)
                channel_omit(channels_[channel_index(i, r)]);
            if (cfg_.record_events)
                trace_.events.push_back({g, i, EventKind::Fault,
                                         static_cast<std::uint64_t>(cfg_.fault->scope), 0,
                                         state_digest(states_[i])});
        }
    }

    std::size_t channel_index(NodeId from, NodeId to) const {
        return std::size_t(from) * states_.size() + to;
    }

    void deliver(Tick g) {
        bool any_ended = false;
        for (const auto& lt : live_)
            if (lt.tx.end() == g) any_ended = true;
        if (!any_ended) return;

        std::vector<Transmission> ended;
        std::vector<const LiveTransmission*> ended_live;
        std::vector<Transmission> window;
        window.reserve(live_.size());
        for (const auto& lt : live_) window.push_back(lt.tx);
        for (const auto& lt : live_) {
            if (lt.tx.end() == g) {
                ended.push_back(lt.tx);
                ended_live.push_back(&lt);
            }
        }

        auto outcomes = resolve(ended, window, cfg_.topology);

        // Adversarial omissions on top of collisions, drawn per transmission
        // in emission order, per eligible receiver in ascending order.
        for (std::size_t k = 0; k < ended.size(); ++k) {
            const auto eligible = cfg_.topology.neighbors(ended[k].sender);
            const auto omitted = adversarial_omit(cfg_.omission, ended[k], eligible,
                                                  window, rng_);
            for (auto& o : outcomes) {
                if (o.sender != ended[k].sender || o.tx_start != ended[k].start) continue;
                if (!o.delivered) continue;
                if (std::find(omitted.begin(), omitted.end(), o.receiver) != omitted.end()) {
                    o.delivered = false;
                    o.cause = LossCause::AdversarialOmission;
                }
            }
        }

        // Channel contents for this delivery round.
        for (std::size_t k = 0; k < ended.size(); ++k) {
            for (const auto& o : outcomes) {
                if (o.sender != ended[k].sender || o.tx_start != ended[k].start) continue;
                auto& q = channels_[channel_index(o.sender, o.receiver)];
                if (o.delivered)
                    channel_write(q, ended_live[k]->tx.bytes);
                else
                    channel_omit(q);
            }
        }

        // Receive handlers in ascending (receiver, sender) order.
        std::vector<std::size_t> order(outcomes.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (outcomes[a].receiver != outcomes[b].receiver)
                return outcomes[a].receiver < outcomes[b].receiver;
            if (outcomes[a].sender != outcomes[b].sender)
                return outcomes[a].sender < outcomes[b].sender;
            return outcomes[a].tx_start < outcomes[b].tx_start;
        });
        for (std::size_t k : order) {
            const auto& o = outcomes[k];
            if (!o.delivered) continue;
            const LiveTransmission* lt = nullptr;
            for (std::size_t e = 0; e < ended.size(); ++e)
                if (ended[e].sender == o.sender && ended[e].start == o.tx_start)
                    lt = ended_live[e];
            assert(lt != nullptr);
            dispatch_receive(g, *lt, o.receiver);
        }

        // File outcomes with their transmission records and retire them.
        for (std::size_t e = 0; e < ended.size(); ++e) {
            auto& rec = trace_.transmissions[ended_live[e]->record];
            for (const auto& o : outcomes)
                if (o.sender == ended[e].sender && o.tx_start == ended[e].start)
                    rec.outcomes.push_back(o);
        }
        std::erase_if(live_, [g](const LiveTransmission& lt) { return lt.tx.end() == g; });
    }

    void dispatch_receive(Tick g, const LiveTransmission& lt, NodeId receiver) {
        auto& q = channels_[channel_index(lt.tx.sender, receiver)];
        if (!q.message) return;
        const auto bytes = *q.message;
        channel_omit(q);

        const auto pkt = wire::decode(bytes);
        if (!pkt) {
            trace_.decode_errors += 1;
            if (cfg_.record_events)
                trace_.events.push_back({g, receiver, EventKind::DecodeError, lt.tx.sender,
                                         0, state_digest(states_[receiver])});
            return;
        }

        Tick t_recv = 0;
        bool found = false;
        for (const auto& [node, stamp] : lt.t_recv) {
            if (node == receiver) {
                t_recv = stamp;
                found = true;
            }
        }
        assert(found);
        (void)found;

        sync_clock(receiver, g);
        const ReceiveMeta meta{lt.tx.sender, lt.t_send, t_recv};
        const auto fx = on_receive(states_[receiver], params_, meta, *pkt, rng_);
        resync_offset(receiver, g);

        if (fx.deliver_payload) trace_.deliveries += 1;
        if (cfg_.record_events) {
            std::uint64_t flags = 0;
            if (fx.conflict_backoff) flags |= 1;
            if (fx.recorded_msg) flags |= 2;
            if (fx.recorded_welcome) flags |= 4;
            if (fx.clock_adjusted) flags |= 8;
            if (fx.deliver_payload) flags |= 16;
            trace_.events.push_back({g, receiver, EventKind::Receive, lt.tx.sender, flags,
                                     state_digest(states_[receiver])});
            if (fx.clock_adjusted)
                trace_.events.push_back({g, receiver, EventKind::ClockAdjust, fx.adjust_delta,
                                         0, state_digest(states_[receiver])});
        }
    }

    void boundaries(Tick g) {
        for (NodeId i = 0; i < states_.size(); ++i) {
            if (clock_at(i, g) % cfg_.slots.xi != 0) continue;
            sync_clock(i, g);
            auto fetch = [this, i]() {
                std::vector<std::uint8_t> payload(8);
                const std::uint64_t s = ++seq_[i];
                for (int b = 0; b < 8; ++b) payload[b] = s >> (8 * b) & 0xff;
                return payload;
            };
            const auto result = on_timeslot(states_[i], params_, fetch, rng_);
            if (cfg_.record_events)
                trace_.events.push_back({g, i, EventKind::Timeslot,
                                         static_cast<std::uint64_t>(result.action), 0,
                                         state_digest(states_[i])});
            if (result.packet) emit(g, i, result, *result.packet);
        }
    }

    void emit(Tick g, NodeId sender, const TimeslotResult& result, const Packet& pkt) {
        LiveTransmission lt;
        lt.tx.sender = sender;
        lt.tx.start = apply_jitter(g, cfg_.jitter, rng_);
        lt.tx.duration = cfg_.slots.xi - (lt.tx.start - g);
        lt.tx.control = result.action == TimeslotAction::ControlPacket;
        lt.tx.slot = slot_of(clock_at(sender, g), cfg_.slots);
        lt.tx.bytes = wire::encode(pkt);
        lt.t_send = clock_at(sender, g);
        for (NodeId r : cfg_.topology.neighbors(sender))
            lt.t_recv.emplace_back(r, clock_at(r, g));

        TransmissionRecord rec;
        rec.sender = sender;
        rec.start = lt.tx.start;
        rec.duration = lt.tx.duration;
        rec.control = lt.tx.control;
        rec.slot = lt.tx.slot;
        rec.t_send = lt.t_send;
        lt.record = trace_.transmissions.size();
        trace_.transmissions.push_back(std::move(rec));

        live_.push_back(std::move(lt));
    }

    const SimConfig& cfg_;
    ProtocolParams params_;
    Tick c_;
    std::vector<NodeState> states_;
    Rng rng_;
    std::vector<Tick> offsets_;
    std::vector<std::uint64_t> seq_;
    std::vector<Channel> channels_;
    std::vector<LiveTransmission> live_;
    Trace trace_;
};

} // namespace

Trace run(const SimConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    auto states = initial_states(cfg, rng);
    Simulation sim(cfg, std::move(states), std::move(rng));
    return sim.run();
}

Trace run_with_states(const SimConfig& cfg, std::vector<NodeState> states) {
    cfg.validate();
    Rng rng(cfg.seed);
    Simulation sim(cfg, std::move(states), std::move(rng));
    return sim.run();
}

} // namespace tdma

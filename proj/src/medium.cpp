#include "tdmasim/medium.hpp"

#include <algorithm>
#include <sstream>

namespace tdma {

std::vector<DeliveryOutcome> resolve(std::span<const Transmission> ended,
                                     std::span<const Transmission> window,
                                     const Topology& graph) {
    std::vector<DeliveryOutcome> outcomes;
    for (const Transmission& tx : ended) {
        for (NodeId rx : graph.neighbors(tx.sender)) {
            DeliveryOutcome out{tx.sender, rx, tx.start, true, LossCause::Ok};
            for (const Transmission& other : window) {
                if (&other == &tx) continue;
                if (other.sender == tx.sender) continue;
                if (!tx.overlaps(other)) continue;
                const bool near_sender = graph.adjacent(other.sender, tx.sender);
                const bool near_receiver =
                    graph.adjacent(other.sender, rx) || other.sender == rx;
                if (near_sender || near_receiver) {
                    out.delivered = false;
                    out.cause = LossCause::Collision;
                    break;
                }
            }
            outcomes.push_back(out);
        }
    }
    return outcomes;
}

void channel_write(Channel& q, std::vector<std::uint8_t> bytes) {
    q.message = std::move(bytes);
}

void channel_omit(Channel& q) {
    q.message.reset();
}

OmissionPolicy OmissionPolicy::parse(const std::string& text) {
    OmissionPolicy p;
    if (text.empty() || text == "none") return p;
    if (text == "always_when_concurrent") {
        p.kind = OmissionKind::AlwaysWhenConcurrent;
        return p;
    }
    if (text.rfind("random:", 0) == 0) {
        p.kind = OmissionKind::Random;
        try {
            p.probability = std::stod(text.substr(7));
        } catch (const std::exception&) {
            throw ConfigError("omission: bad probability in '" + text + "'");
        }
        if (p.probability < 0.0 || p.probability > 1.0)
            throw ConfigError("omission: probability must be in [0, 1]");
        return p;
    }
    if (text.rfind("targeted:", 0) == 0) {
        p.kind = OmissionKind::Targeted;
        std::stringstream ss(text.substr(9));
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            try {
                p.targets.push_back(static_cast<NodeId>(std::stoul(item)));
            } catch (const std::exception&) {
                throw ConfigError("omission: bad node id in '" + text + "'");
            }
        }
        return p;
    }
    throw ConfigError("omission: unknown policy '" + text + "'");
}

std::string OmissionPolicy::to_string() const {
    switch (kind) {
        case OmissionKind::None:
            return "none";
        case OmissionKind::AlwaysWhenConcurrent:
            return "always_when_concurrent";
        case OmissionKind::Random:
            return "random:" + std::to_string(probability);
        case OmissionKind::Targeted: {
            std::string out = "targeted:";
            for (std::size_t i = 0; i < targets.size(); ++i) {
                if (i) out += ',';
                out += std::to_string(targets[i]);
            }
            return out;
        }
    }
    return "none";
}

std::vector<NodeId> adversarial_omit(const OmissionPolicy& policy,
                                     const Transmission& tx,
                                     std::span<const NodeId> eligible,
                                     std::span<const Transmission> window,
                                     Rng& rng) {
    std::vector<NodeId> omitted;
    switch (policy.kind) {
        case OmissionKind::None:
            break;
        case OmissionKind::Random:
            for (NodeId r : eligible)
                if (rng.chance(policy.probability)) omitted.push_back(r);
            break;
        case OmissionKind::Targeted:
            for (NodeId r : eligible)
                if (std::find(policy.targets.begin(), policy.targets.end(), r) !=
                    policy.targets.end())
                    omitted.push_back(r);
            break;
        case OmissionKind::AlwaysWhenConcurrent: {
            bool concurrent = false;
            for (const Transmission& other : window) {
                if (&other == &tx || other.sender == tx.sender) continue;
                if (tx.overlaps(other)) {
                    concurrent = true;
                    break;
                }
            }
            if (concurrent) omitted.assign(eligible.begin(), eligible.end());
            break;
        }
    }
    return omitted;
}

} // namespace tdma

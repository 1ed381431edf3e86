#include "relayguard/gossip.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iterator>
#include <ostream>

#include "relayguard/config.hpp"
#include "relayguard/errors.hpp"

namespace relayguard {

void GossipConfig::validate() const {
    if (!(f_moderate >= 0.0 && f_moderate <= 1.0)) throw Error(Errc::InvalidConfig, "gossip: f_moderate must lie in [0,1]");
    if (!(p_low_forward >= 0.0 && p_low_forward <= 1.0)) {
        throw Error(Errc::InvalidConfig, "gossip: p_low_forward must lie in [0,1]");
    }
}

GossipConfig GossipConfig::from_config(const Config& cfg, const std::string& prefix) {
    GossipConfig c;
    c.f_moderate = cfg.get_double(prefix + "f_moderate", c.f_moderate);
    c.p_low_forward = cfg.get_double(prefix + "p_low_forward", c.p_low_forward);
    c.drop_low_when_congested = cfg.get_bool(prefix + "drop_low_when_congested", c.drop_low_when_congested);
    c.validate();
    return c;
}

void GossipConfig::describe(ResolvedConfig& out, const std::string& prefix) const {
    out.add(prefix + "f_moderate", f_moderate);
    out.add(prefix + "p_low_forward", p_low_forward);
    out.add(prefix + "drop_low_when_congested", drop_low_when_congested);
}

std::vector<std::size_t> forward_set(const GossipConfig& cfg, const AdmissionConfig& bands,
                                     std::span<const std::size_t> neighbors, double score, bool congested, Rng& rng) {
    std::vector<std::size_t> out;
    switch (band_of(bands, score)) {
        case ReputationBand::High:
            out.assign(neighbors.begin(), neighbors.end());
            break;
        case ReputationBand::Moderate: {
            const auto want = static_cast<std::size_t>(std::ceil(cfg.f_moderate * static_cast<double>(neighbors.size())));
            std::sample(neighbors.begin(), neighbors.end(), std::back_inserter(out), want, rng);
            break;
        }
        case ReputationBand::Low:
            if (congested && cfg.drop_low_when_congested) break;
            for (auto nb : neighbors) {
                if (uniform01(rng) < cfg.p_low_forward) out.push_back(nb);
            }
            break;
    }
    return out;
}

ReputationRelay::ReputationRelay(GossipConfig gossip, AdmissionConfig bands, Scorer scorer, bool congested)
    : gossip_(gossip), bands_(bands), scorer_(std::move(scorer)), congested_(congested) {
    gossip_.validate();
    bands_.validate();
}

bool ReputationRelay::accepts(std::size_t node, const Transaction& tx) const {
    if (!congested_ || !gossip_.drop_low_when_congested) return true;
    return band_of(bands_, scorer_(node, tx.sender)) != ReputationBand::Low;
}

std::vector<std::size_t> ReputationRelay::forward(std::size_t node, const Transaction& tx,
                                                  std::span<const std::size_t> neighbors, Rng& rng) const {
    return forward_set(gossip_, bands_, neighbors, scorer_(node, tx.sender), congested_, rng);
}

PropagationResult propagate(const Overlay& overlay, const Transaction& tx, bool is_spam, std::size_t origin,
                            const RelayPolicy& policy, Rng& rng) {
    const auto n = overlay.n_nodes();
    if (origin >= n) {
        throw Error(Errc::OriginOutOfRange,
                    "origin " + std::to_string(origin) + " outside overlay of " + std::to_string(n) + " nodes");
    }
    std::vector<char> evaluated(n, 0);
    std::deque<std::size_t> frontier;
    evaluated[origin] = 1;
    std::size_t reached = 1;
    if (policy.accepts(origin, tx)) frontier.push_back(origin);

    while (!frontier.empty()) {
        const auto v = frontier.front();
        frontier.pop_front();
        for (auto w : policy.forward(v, tx, overlay.neighbors(v), rng)) {
            if (evaluated[w]) continue;
            evaluated[w] = 1;
            if (policy.accepts(w, tx)) {
                ++reached;
                frontier.push_back(w);
            }
        }
    }
    return {tx.tx_id, is_spam, reached, static_cast<double>(reached) / static_cast<double>(n)};
}

void write_coverage_header(std::ostream& out) { out << "tx_id,is_spam,policy,reached,coverage\n"; }

void write_coverage_row(std::ostream& out, const PropagationResult& r, PolicyKind policy) {
    out << r.tx_id << ',' << (r.is_spam ? 1 : 0) << ',' << policy_name(policy) << ',' << r.reached << ','
        << format_fixed(r.coverage, 6) << '\n';
}

}  // namespace relayguard

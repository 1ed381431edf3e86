#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "relayguard/admission.hpp"
#include "relayguard/baselines.hpp"
#include "relayguard/overlay.hpp"
#include "relayguard/random.hpp"
#include "relayguard/trace.hpp"

namespace relayguard {

class Config;
class ResolvedConfig;

struct GossipConfig {
    double f_moderate = 0.5;
    double p_low_forward = 0.1;
    bool drop_low_when_congested = true;

    void validate() const;

    static GossipConfig from_config(const Config& cfg, const std::string& prefix = "gossip.");
    void describe(ResolvedConfig& out, const std::string& prefix = "gossip.") const;
};

/// Neighbors a node relays to for a sender scored `score` by that node.
///  - high band: every neighbor.
///  - moderate band: ceil(f_moderate * |neighbors|) chosen uniformly.
///  - low band: nobody when congested and drop_low_when_congested, else
///    each neighbor independently with probability p_low_forward.
/// The result keeps the input order.
std::vector<std::size_t> forward_set(const GossipConfig& cfg, const AdmissionConfig& bands,
                                     std::span<const std::size_t> neighbors, double score, bool congested, Rng& rng);

/// Per-node relay behavior during propagation.
class RelayPolicy {
public:
    virtual ~RelayPolicy() = default;

    /// Whether `node` admits the transaction on arrival.
    virtual bool accepts(std::size_t node, const Transaction& tx) const = 0;

    virtual std::vector<std::size_t> forward(std::size_t node, const Transaction& tx,
                                             std::span<const std::size_t> neighbors, Rng& rng) const = 0;

    virtual PolicyKind kind() const noexcept = 0;
};

/// Floods: every node accepts and forwards to every neighbor.
class NaiveRelay final : public RelayPolicy {
public:
    bool accepts(std::size_t, const Transaction&) const override { return true; }
    std::vector<std::size_t> forward(std::size_t, const Transaction&, std::span<const std::size_t> neighbors,
                                     Rng&) const override {
        return {neighbors.begin(), neighbors.end()};
    }
    PolicyKind kind() const noexcept override { return PolicyKind::Naive; }
};

/// Floods, except that a node drops senders it currently bans.
class BanManRelay final : public RelayPolicy {
public:
    /// One state per node, indexed by node id; must outlive the relay.
    BanManRelay(std::vector<const BanManState*> states, double now) : states_(std::move(states)), now_(now) {}

    bool accepts(std::size_t node, const Transaction& tx) const override {
        return !states_.at(node)->is_banned(tx.sender, now_);
    }
    std::vector<std::size_t> forward(std::size_t, const Transaction&, std::span<const std::size_t> neighbors,
                                     Rng&) const override {
        return {neighbors.begin(), neighbors.end()};
    }
    PolicyKind kind() const noexcept override { return PolicyKind::BanMan; }

private:
    std::vector<const BanManState*> states_;
    double now_;
};

/// Reputation-aware relay. Each node consults its own score for the sender.
/// Arrival is admitted unless the sender is low band, the node is congested
/// and drop_low_when_congested holds; fan-out follows forward_set.
class ReputationRelay final : public RelayPolicy {
public:
    using Scorer = std::function<double(std::size_t node, const std::string& sender)>;

    ReputationRelay(GossipConfig gossip, AdmissionConfig bands, Scorer scorer, bool congested = false);

    bool accepts(std::size_t node, const Transaction& tx) const override;
    std::vector<std::size_t> forward(std::size_t node, const Transaction& tx, std::span<const std::size_t> neighbors,
                                     Rng& rng) const override;
    PolicyKind kind() const noexcept override { return PolicyKind::Ours; }

private:
    GossipConfig gossip_;
    AdmissionConfig bands_;
    Scorer scorer_;
    bool congested_;
};

struct PropagationResult {
    std::uint64_t tx_id = 0;
    bool is_spam = false;
    std::size_t reached = 0;
    double coverage = 0.0;

    friend bool operator==(const PropagationResult&, const PropagationResult&) = default;
};

/// Breadth-first relay from `origin`. The origin always counts as reached
/// and forwards only if it accepts. Every other node evaluates a given
/// transaction at most once; `reached` counts the nodes that accepted.
/// Throws Error(OriginOutOfRange).
PropagationResult propagate(const Overlay& overlay, const Transaction& tx, bool is_spam, std::size_t origin,
                            const RelayPolicy& policy, Rng& rng);

/// CSV header `tx_id,is_spam,policy,reached,coverage`.
void write_coverage_header(std::ostream& out);
void write_coverage_row(std::ostream& out, const PropagationResult& r, PolicyKind policy);

}  // namespace relayguard

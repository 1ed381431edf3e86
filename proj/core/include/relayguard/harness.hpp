#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relayguard/admission.hpp"
#include "relayguard/baselines.hpp"
#include "relayguard/gossip.hpp"
#include "relayguard/labeler.hpp"
#include "relayguard/monitor.hpp"
#include "relayguard/reputation.hpp"
#include "relayguard/trace.hpp"

namespace relayguard {

class Config;
class ResolvedConfig;

/// Every tunable of the three experiments, resolved from a flat config.
struct ExperimentSettings {
    LabelerConfig labeler;
    MonitorConfig monitor;
    ReputationConfig reputation;
    AdmissionConfig admission;
    GossipConfig gossip;
    BaselineSettings baselines;

    // Replay node model.
    double block_interval_s = 12.0;
    std::uint64_t block_capacity = 150;
    /// Mempool occupancy when the replay starts, as a fraction of capacity.
    /// The trace is a window cut out of an ongoing congestion event, so the
    /// node does not start empty.
    double initial_mempool_fill = 0.9;
    /// Feed block inclusion back into the monitor's non-inclusion rule.
    bool inclusion_feedback = false;

    // Reputation evolution.
    std::uint64_t evo_peers = 100;
    std::uint64_t evo_steps = 100;
    std::uint64_t evo_switch_step = 50;
    double evo_step_s = 1.0;
    double mix_honest = 0.4;
    double mix_sybil = 0.4;
    double mix_reforming = 0.2;
    std::uint64_t honest_fee = 50;
    std::uint64_t sybil_fee_min = 1;
    std::uint64_t sybil_fee_max = 10;
    double sybil_revert_prob = 0.8;

    // Propagation.
    std::uint64_t overlay_nodes = 100;
    std::uint64_t overlay_degree = 8;
    std::uint64_t propagation_sample = 2000;
    /// Each node sees a given trace transaction with its own probability,
    /// drawn once per node from [observe_prob_min, observe_prob_max].
    double observe_prob_min = 0.8;
    double observe_prob_max = 1.0;
    bool propagation_congested = false;

    void validate() const;

    /// Reads the sectioned keys (`monitor.`, `reputation.`, `admission.`,
    /// `gossip.`, `banman.`, `eip1559.`, `simd110.`, `labeler.`,
    /// `experiment.`). Throws Error(InvalidConfig) on a bad value or on any
    /// key no consumer recognized.
    static ExperimentSettings from_config(const Config& cfg);
    void describe(ResolvedConfig& out) const;
};

struct ReplayMetrics {
    PolicyKind policy = PolicyKind::Naive;
    std::size_t spam_total = 0;
    std::size_t spam_accepted = 0;
    std::size_t honest_total = 0;
    std::size_t honest_dropped = 0;

    // Decision breakdown. accepted counts immediate accepts plus queued
    // transactions later released into the mempool.
    std::size_t accepted = 0;
    std::size_t queued_released = 0;
    std::size_t dropped_policy = 0;          // baseline Drop
    std::size_t dropped_low_reputation = 0;  // Ours
    std::size_t dropped_queue_full = 0;
    std::size_t dropped_congested = 0;  // mempool full on insert or release
    std::size_t evicted_at_end = 0;     // still queued when the trace ended

    std::size_t processed() const noexcept { return spam_total + honest_total; }
    std::size_t dropped() const noexcept {
        return dropped_policy + dropped_low_reputation + dropped_queue_full + dropped_congested + evicted_at_end;
    }
    double fn_rate() const noexcept {
        return spam_total == 0 ? 0.0 : static_cast<double>(spam_accepted) / static_cast<double>(spam_total);
    }
    double fp_rate() const noexcept {
        return honest_total == 0 ? 0.0 : static_cast<double>(honest_dropped) / static_cast<double>(honest_total);
    }
};

/// Replays the trace through one node running `policy`. `is_spam` is the
/// per-position ground truth. Throws Error(LabelMismatch) on a length
/// mismatch.
ReplayMetrics run_replay(const Trace& trace, const std::vector<bool>& is_spam, PolicyKind policy,
                         const ExperimentSettings& settings, std::uint64_t seed);
ReplayMetrics run_replay(const Trace& trace, const Labels& labels, PolicyKind policy,
                         const ExperimentSettings& settings, std::uint64_t seed);

enum class PeerRole : std::uint8_t { Honest, Sybil, Reforming };

std::string_view role_name(PeerRole role) noexcept;

struct EvolutionRow {
    std::uint64_t step = 0;
    PeerRole role = PeerRole::Honest;
    std::size_t peers = 0;
    double mean = 0.0;
    double std = 0.0;
};

struct EvolutionResult {
    std::vector<EvolutionRow> rows;  // step-major, classes in enum order

    /// Throws std::out_of_range when the class is absent.
    const EvolutionRow& at(std::uint64_t step, PeerRole role) const;
    bool has(PeerRole role) const;
};

/// Scripted peers emit one transaction per step to a single observer,
/// which runs the monitor and reputation pipeline. Rows cover step 0 (the
/// neutral start) through evo_steps. Throws Error(InvalidMix).
EvolutionResult run_reputation_evolution(const ExperimentSettings& settings, std::uint64_t seed);

struct CoverageSummary {
    PolicyKind policy = PolicyKind::Naive;
    std::size_t spam_count = 0;
    std::size_t honest_count = 0;
    double spam_mean = 0.0;
    double honest_mean = 0.0;
};

struct PropagationReport {
    std::uint64_t overlay_salt = 0;
    std::vector<PropagationResult> naive, banman, ours;  // sample order
    std::vector<CoverageSummary> summaries;              // naive, banman, ours

    const CoverageSummary& summary(PolicyKind policy) const;
};

/// Builds the overlay from `seed`, walks the trace in time order letting
/// every node observe its share of it, and propagates each sampled
/// transaction from a random origin against the node states as they stand
/// just before that transaction.
PropagationReport run_propagation(const Trace& trace, const std::vector<bool>& is_spam,
                                  const ExperimentSettings& settings, std::uint64_t seed,
                                  const Overlay* overlay = nullptr);

}  // namespace relayguard

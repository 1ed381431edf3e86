#include "relayguard/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "relayguard/config.hpp"
#include "relayguard/errors.hpp"
#include "relayguard/random.hpp"

namespace relayguard {

namespace {

constexpr std::uint64_t kSaltAdmission = 0x61646d;
constexpr std::uint64_t kSaltEvolution = 0x65766f;
constexpr std::uint64_t kSaltObserve = 0x6f6273;
constexpr std::uint64_t kSaltSample = 0x736d70;
constexpr std::uint64_t kSaltOrigin = 0x6f7267;
constexpr std::uint64_t kSaltRelay = 0x726c79;

void require(bool ok, const std::string& why) {
    if (!ok) throw Error(Errc::InvalidConfig, "experiment: " + why);
}

bool is_fraction(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

void ExperimentSettings::validate() const {
    monitor.validate();
    reputation.validate();
    admission.validate();
    gossip.validate();
    require(block_interval_s > 0.0, "block_interval_s must be positive");
    require(is_fraction(initial_mempool_fill), "initial_mempool_fill must lie in [0,1]");
    require(evo_peers > 0 && evo_steps > 0, "evolution needs peers and steps");
    require(evo_step_s > 0.0, "evo_step_s must be positive");
    require(sybil_fee_min <= sybil_fee_max, "sybil_fee_min must not exceed sybil_fee_max");
    require(is_fraction(sybil_revert_prob), "sybil_revert_prob must lie in [0,1]");
    require(is_fraction(observe_prob_min) && is_fraction(observe_prob_max) && observe_prob_min <= observe_prob_max,
            "observe_prob bounds must satisfy 0 <= min <= max <= 1");
}

ExperimentSettings ExperimentSettings::from_config(const Config& cfg) {
    ExperimentSettings s;
    s.labeler = LabelerConfig::from_config(cfg);
    s.monitor = MonitorConfig::from_config(cfg);
    s.reputation = ReputationConfig::from_config(cfg);
    s.admission = AdmissionConfig::from_config(cfg);
    s.gossip = GossipConfig::from_config(cfg);
    s.baselines.banman = BanManConfig::from_config(cfg);
    s.baselines.eip1559 = Eip1559Config::from_config(cfg);
    s.baselines.simd110 = Simd110Config::from_config(cfg);

    const std::string p = "experiment.";
    s.block_interval_s = cfg.get_double(p + "block_interval_s", s.block_interval_s);
    s.block_capacity = cfg.get_u64(p + "block_capacity", s.block_capacity);
    s.initial_mempool_fill = cfg.get_double(p + "initial_mempool_fill", s.initial_mempool_fill);
    s.inclusion_feedback = cfg.get_bool(p + "inclusion_feedback", s.inclusion_feedback);
    s.evo_peers = cfg.get_u64(p + "evo_peers", s.evo_peers);
    s.evo_steps = cfg.get_u64(p + "evo_steps", s.evo_steps);
    s.evo_switch_step = cfg.get_u64(p + "evo_switch_step", s.evo_switch_step);
    s.evo_step_s = cfg.get_double(p + "evo_step_s", s.evo_step_s);
    s.mix_honest = cfg.get_double(p + "mix_honest", s.mix_honest);
    s.mix_sybil = cfg.get_double(p + "mix_sybil", s.mix_sybil);
    s.mix_reforming = cfg.get_double(p + "mix_reforming", s.mix_reforming);
    s.honest_fee = cfg.get_u64(p + "honest_fee", s.honest_fee);
    s.sybil_fee_min = cfg.get_u64(p + "sybil_fee_min", s.sybil_fee_min);
    s.sybil_fee_max = cfg.get_u64(p + "sybil_fee_max", s.sybil_fee_max);
    s.sybil_revert_prob = cfg.get_double(p + "sybil_revert_prob", s.sybil_revert_prob);
    s.overlay_nodes = cfg.get_u64(p + "overlay_nodes", s.overlay_nodes);
    s.overlay_degree = cfg.get_u64(p + "overlay_degree", s.overlay_degree);
    s.propagation_sample = cfg.get_u64(p + "propagation_sample", s.propagation_sample);
    s.observe_prob_min = cfg.get_double(p + "observe_prob_min", s.observe_prob_min);
    s.observe_prob_max = cfg.get_double(p + "observe_prob_max", s.observe_prob_max);
    s.propagation_congested = cfg.get_bool(p + "propagation_congested", s.propagation_congested);
    s.validate();

    const auto unused = cfg.unused_keys();
    if (!unused.empty()) {
        std::string list;
        for (const auto& k : unused) list += (list.empty() ? "" : ", ") + k;
        throw Error(Errc::InvalidConfig, "unknown config key(s): " + list);
    }
    return s;
}

void ExperimentSettings::describe(ResolvedConfig& out) const {
    labeler.describe(out);
    monitor.describe(out);
    reputation.describe(out);
    admission.describe(out);
    gossip.describe(out);
    baselines.banman.describe(out);
    baselines.eip1559.describe(out);
    baselines.simd110.describe(out);
    const std::string p = "experiment.";
    out.add(p + "block_interval_s", block_interval_s);
    out.add(p + "block_capacity", block_capacity);
    out.add(p + "initial_mempool_fill", initial_mempool_fill);
    out.add(p + "inclusion_feedback", inclusion_feedback);
    out.add(p + "evo_peers", evo_peers);
    out.add(p + "evo_steps", evo_steps);
    out.add(p + "evo_switch_step", evo_switch_step);
    out.add(p + "evo_step_s", evo_step_s);
    out.add(p + "mix_honest", mix_honest);
    out.add(p + "mix_sybil", mix_sybil);
    out.add(p + "mix_reforming", mix_reforming);
    out.add(p + "honest_fee", honest_fee);
    out.add(p + "sybil_fee_min", sybil_fee_min);
    out.add(p + "sybil_fee_max", sybil_fee_max);
    out.add(p + "sybil_revert_prob", sybil_revert_prob);
    out.add(p + "overlay_nodes", overlay_nodes);
    out.add(p + "overlay_degree", overlay_degree);
    out.add(p + "propagation_sample", propagation_sample);
    out.add(p + "observe_prob_min", observe_prob_min);
    out.add(p + "observe_prob_max", observe_prob_max);
    out.add(p + "propagation_congested", propagation_congested);
}

// ---------------------------------------------------------------------------
// Trace replay

namespace {

// Kinds in tie-break order at equal timestamps.
enum class EventKind : int { Block = 0, QueueRelease = 1, DecayEpoch = 2, Transaction = 3 };

void tally(ReplayMetrics& m, bool spam, bool accepted) {
    if (spam) {
        m.spam_accepted += accepted ? 1 : 0;
    } else {
        m.honest_dropped += accepted ? 0 : 1;
    }
}

ReplayMetrics replay_baseline(const Trace& trace, const std::vector<bool>& is_spam, PolicyKind kind,
                              const ExperimentSettings& settings) {
    const auto stats = compute_dataset_stats(trace, settings.labeler);
    auto policy = make_baseline(kind, settings.baselines, stats.fee_p10);
    ReplayMetrics m;
    m.policy = kind;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto& tx = trace[i];
        const bool ok = policy->decide(tx, static_cast<double>(tx.timestamp)) == BinaryDecision::Accept;
        if (ok) {
            ++m.accepted;
        } else {
            ++m.dropped_policy;
        }
        tally(m, is_spam[i], ok);
    }
    return m;
}

class OursNode {
public:
    OursNode(const ExperimentSettings& s, const std::vector<bool>& is_spam, double t0, ReplayMetrics& m)
        : s_(s),
          is_spam_(is_spam),
          m_(m),
          monitor_(s.monitor),
          reputation_(s.reputation),
          mempool_(s.admission.mempool_capacity),
          queue_(s.admission.queue_capacity),
          next_block_(t0 + s.block_interval_s),
          next_decay_(t0 + s.reputation.epoch_s) {
        const auto fill = static_cast<std::size_t>(
            std::llround(s.initial_mempool_fill * static_cast<double>(s.admission.mempool_capacity)));
        for (std::size_t i = 0; i < fill; ++i) mempool_.insert({0, 0, true});
    }

    /// Runs every periodic/queue event due before a transaction at time t.
    void advance_to(double t) {
        while (true) {
            double when = std::numeric_limits<double>::infinity();
            EventKind kind = EventKind::Transaction;
            auto consider = [&](double at, EventKind k) {
                if (at < when || (at == when && static_cast<int>(k) < static_cast<int>(kind))) {
                    when = at;
                    kind = k;
                }
            };
            consider(next_block_, EventKind::Block);
            if (!queue_.empty()) consider(queue_.entries().front().release_at, EventKind::QueueRelease);
            consider(next_decay_, EventKind::DecayEpoch);
            if (when > t) return;
            switch (kind) {
                case EventKind::Block: on_block(); break;
                case EventKind::QueueRelease: on_release(when); break;
                case EventKind::DecayEpoch: on_decay(); break;
                case EventKind::Transaction: return;
            }
        }
    }

    void on_transaction(const Trace& trace, std::size_t pos, std::uint64_t seed) {
        const auto& tx = trace[pos];
        const double now = static_cast<double>(tx.timestamp);
        std::optional<std::uint64_t> block;
        if (s_.inclusion_feedback) block = block_height_;
        const auto verdict = monitor_.process(tx, block);
        reputation_.update(tx.sender, verdict, now);

        const bool congested = is_congested(s_.admission, mempool_);
        Rng rng = make_rng(seed, {kSaltAdmission, tx.tx_id});
        const auto d =
            decide(s_.admission, reputation_.score(tx.sender), congested, queue_.size(), uniform01(rng), now);
        const MempoolEntry entry{tx.tx_id, pos, false};
        switch (d.kind) {
            case AdmissionDecision::Kind::Accept:
                if (mempool_.insert(entry)) {
                    settle(pos, true);
                } else {
                    ++m_.dropped_congested;
                    settle(pos, false);
                }
                break;
            case AdmissionDecision::Kind::Queue:
                // decide() only queues while the queue has room.
                queue_.push(entry, d.release_at);
                break;
            case AdmissionDecision::Kind::Drop:
                if (d.reason == DropReason::QueueFull) {
                    ++m_.dropped_queue_full;
                } else if (d.reason == DropReason::Congested) {
                    ++m_.dropped_congested;
                } else {
                    ++m_.dropped_low_reputation;
                }
                settle(pos, false);
                break;
        }
    }

    void finish() {
        for (const auto& q : queue_.drain()) {
            ++m_.evicted_at_end;
            settle(q.entry.ref, false);
        }
    }

private:
    void settle(std::size_t pos, bool accepted) {
        if (accepted) ++m_.accepted;
        tally(m_, is_spam_[pos], accepted);
    }

    void on_block() {
        ++block_height_;
        monitor_.set_block_height(block_height_);
        for (const auto& e : mempool_.take(s_.block_capacity)) {
            if (s_.inclusion_feedback && !e.background) included_.push_back(e.ref);
        }
        next_block_ += s_.block_interval_s;
    }

    void on_release(double now) {
        auto r = tick(queue_, mempool_, now);
        for (const auto& e : r.released) {
            ++m_.queued_released;
            settle(e.ref, true);
        }
        for (const auto& e : r.dropped) {
            ++m_.dropped_congested;
            settle(e.ref, false);
        }
    }

    void on_decay() {
        reputation_.decay_epoch(next_decay_);
        next_decay_ += s_.reputation.epoch_s;
    }

public:
    /// Positions included by blocks since the last call (inclusion feedback).
    std::vector<std::size_t> take_included() { return std::exchange(included_, {}); }
    BehaviorMonitor& monitor() { return monitor_; }

private:
    const ExperimentSettings& s_;
    const std::vector<bool>& is_spam_;
    ReplayMetrics& m_;
    BehaviorMonitor monitor_;
    ReputationTable reputation_;
    Mempool mempool_;
    DelayQueue queue_;
    double next_block_;
    double next_decay_;
    std::uint64_t block_height_ = 0;
    std::vector<std::size_t> included_;
};

}  // namespace

ReplayMetrics run_replay(const Trace& trace, const std::vector<bool>& is_spam, PolicyKind policy,
                         const ExperimentSettings& settings, std::uint64_t seed) {
    if (is_spam.size() != trace.size()) {
        throw Error(Errc::LabelMismatch, "labels cover " + std::to_string(is_spam.size()) + " rows, trace has " +
                                             std::to_string(trace.size()));
    }
    if (trace.empty()) throw Error(Errc::EmptyTrace, "cannot replay an empty trace");

    ReplayMetrics m;
    for (bool spam : is_spam) (spam ? m.spam_total : m.honest_total) += 1;
    if (policy != PolicyKind::Ours) {
        auto b = replay_baseline(trace, is_spam, policy, settings);
        b.spam_total = m.spam_total;
        b.honest_total = m.honest_total;
        return b;
    }

    m.policy = PolicyKind::Ours;
    OursNode node(settings, is_spam, static_cast<double>(trace[0].timestamp), m);
    for (std::size_t i = 0; i < trace.size(); ++i) {
        node.advance_to(static_cast<double>(trace[i].timestamp));
        for (auto pos : node.take_included()) node.monitor().mark_included(trace[pos].sender, trace[pos].tx_id);
        node.on_transaction(trace, i, seed);
    }
    node.finish();
    return m;
}

ReplayMetrics run_replay(const Trace& trace, const Labels& labels, PolicyKind policy,
                         const ExperimentSettings& settings, std::uint64_t seed) {
    return run_replay(trace, align_labels(trace, labels), policy, settings, seed);
}

// ---------------------------------------------------------------------------
// Reputation evolution

std::string_view role_name(PeerRole role) noexcept {
    switch (role) {
        case PeerRole::Honest: return "honest";
        case PeerRole::Sybil: return "sybil";
        case PeerRole::Reforming: return "reforming";
    }
    return "?";
}

const EvolutionRow& EvolutionResult::at(std::uint64_t step, PeerRole role) const {
    for (const auto& r : rows) {
        if (r.step == step && r.role == role) return r;
    }
    throw std::out_of_range("no evolution row for step " + std::to_string(step));
}

bool EvolutionResult::has(PeerRole role) const {
    return std::any_of(rows.begin(), rows.end(), [role](const auto& r) { return r.role == role; });
}

namespace {

std::string hex_address(Rng& rng) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s = "0x";
    for (int i = 0; i < 40; ++i) s.push_back(kHex[rng() & 15]);
    return s;
}

Digest payload_digest(std::uint64_t peer, std::uint64_t serial) {
    std::array<std::uint8_t, 16> raw{};
    for (int i = 0; i < 8; ++i) {
        raw[i] = static_cast<std::uint8_t>(peer >> (8 * i));
        raw[8 + i] = static_cast<std::uint8_t>(serial >> (8 * i));
    }
    return sha256(raw);
}

}  // namespace

EvolutionResult run_reputation_evolution(const ExperimentSettings& s, std::uint64_t seed) {
    const double mixes[] = {s.mix_honest, s.mix_sybil, s.mix_reforming};
    for (double f : mixes) {
        if (!(f >= 0.0 && f <= 1.0)) throw Error(Errc::InvalidMix, "class fractions must lie in [0,1]");
    }
    if (std::abs(s.mix_honest + s.mix_sybil + s.mix_reforming - 1.0) > 1e-9) {
        throw Error(Errc::InvalidMix, "class fractions must sum to 1");
    }

    const auto n = s.evo_peers;
    const auto n_honest = static_cast<std::uint64_t>(std::llround(s.mix_honest * static_cast<double>(n)));
    const auto n_sybil = std::min<std::uint64_t>(
        n - n_honest, static_cast<std::uint64_t>(std::llround(s.mix_sybil * static_cast<double>(n))));
    std::vector<PeerRole> roles(n, PeerRole::Reforming);
    std::fill_n(roles.begin(), n_honest, PeerRole::Honest);
    std::fill_n(roles.begin() + static_cast<std::ptrdiff_t>(n_honest), n_sybil, PeerRole::Sybil);
    if (s.mix_reforming == 0.0) {
        for (auto& r : roles) {
            if (r == PeerRole::Reforming) r = s.mix_sybil > 0.0 ? PeerRole::Sybil : PeerRole::Honest;
        }
    }

    Rng rng = make_rng(seed, {kSaltEvolution});
    std::vector<std::string> senders;
    senders.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) senders.push_back(hex_address(rng));

    BehaviorMonitor monitor(s.monitor);
    ReputationTable table(s.reputation);
    EvolutionResult result;

    auto snapshot = [&](std::uint64_t step) {
        for (auto role : {PeerRole::Honest, PeerRole::Sybil, PeerRole::Reforming}) {
            std::vector<double> scores;
            for (std::uint64_t i = 0; i < n; ++i) {
                if (roles[i] == role) scores.push_back(table.score(senders[i]));
            }
            if (scores.empty()) continue;
            const auto ms = mean_std(scores);
            result.rows.push_back({step, role, scores.size(), ms.mean, ms.std});
        }
    };
    snapshot(0);

    std::uniform_int_distribution<std::uint64_t> sybil_fee(s.sybil_fee_min, s.sybil_fee_max);
    const auto t0 = static_cast<std::int64_t>(SyntheticProfile{}.start_time);
    std::uint64_t tx_id = 0;
    double next_decay = static_cast<double>(t0) + s.reputation.epoch_s;
    for (std::uint64_t step = 1; step <= s.evo_steps; ++step) {
        const double now = static_cast<double>(t0) + static_cast<double>(step) * s.evo_step_s;
        while (next_decay <= now) {
            table.decay_epoch(next_decay);
            next_decay += s.reputation.epoch_s;
        }
        for (std::uint64_t i = 0; i < n; ++i) {
            const bool spammy =
                roles[i] == PeerRole::Sybil || (roles[i] == PeerRole::Reforming && step <= s.evo_switch_step);
            Transaction tx;
            tx.timestamp = static_cast<std::int64_t>(std::floor(now));
            tx.sender = senders[i];
            tx.tx_id = tx_id++;
            tx.calldata_len = 68;
            if (spammy) {
                tx.calldata_hash = payload_digest(i, 0);
                tx.gas_price = sybil_fee(rng);
                tx.receipt_status = uniform01(rng) < s.sybil_revert_prob ? ReceiptStatus::Revert : ReceiptStatus::Success;
                tx.gas_used = 30000;
            } else {
                tx.calldata_hash = payload_digest(i, step);
                tx.gas_price = s.honest_fee;
                tx.receipt_status = ReceiptStatus::Success;
                tx.gas_used = 120000;
            }
            const auto verdict = monitor.process(tx);
            table.update(tx.sender, verdict, now);
        }
        snapshot(step);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Propagation

const CoverageSummary& PropagationReport::summary(PolicyKind policy) const {
    for (const auto& s : summaries) {
        if (s.policy == policy) return s;
    }
    throw std::out_of_range("no coverage summary for policy");
}

namespace {

struct NodeState {
    double observe_prob = 1.0;
    BehaviorMonitor monitor;
    ReputationTable reputation;
    BanManState banman;
};

CoverageSummary summarize(PolicyKind policy, const std::vector<PropagationResult>& results) {
    CoverageSummary s;
    s.policy = policy;
    double spam = 0.0, honest = 0.0;
    for (const auto& r : results) {
        if (r.is_spam) {
            ++s.spam_count;
            spam += r.coverage;
        } else {
            ++s.honest_count;
            honest += r.coverage;
        }
    }
    s.spam_mean = s.spam_count ? spam / static_cast<double>(s.spam_count) : 0.0;
    s.honest_mean = s.honest_count ? honest / static_cast<double>(s.honest_count) : 0.0;
    return s;
}

}  // namespace

PropagationReport run_propagation(const Trace& trace, const std::vector<bool>& is_spam,
                                  const ExperimentSettings& settings, std::uint64_t seed, const Overlay* overlay) {
    if (is_spam.size() != trace.size()) {
        throw Error(Errc::LabelMismatch, "labels cover " + std::to_string(is_spam.size()) + " rows, trace has " +
                                             std::to_string(trace.size()));
    }
    if (trace.empty()) throw Error(Errc::EmptyTrace, "cannot propagate an empty trace");

    std::optional<Overlay> built;
    if (!overlay) {
        built = build_overlay(settings.overlay_nodes, settings.overlay_degree, seed);
        overlay = &*built;
    }
    const auto n = overlay->n_nodes();
    const auto stats = compute_dataset_stats(trace, settings.labeler);

    std::vector<NodeState> nodes;
    nodes.reserve(n);
    {
        Rng rng = make_rng(seed, {kSaltObserve});
        std::uniform_real_distribution<double> q(settings.observe_prob_min, settings.observe_prob_max);
        for (std::size_t i = 0; i < n; ++i) {
            nodes.push_back({q(rng), BehaviorMonitor(settings.monitor), ReputationTable(settings.reputation),
                             BanManState(settings.baselines.banman, stats.fee_p10)});
        }
    }

    // Sample positions, kept in trace order.
    std::vector<std::size_t> positions(trace.size());
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    std::vector<std::size_t> sample;
    {
        Rng rng = make_rng(seed, {kSaltSample});
        std::sample(positions.begin(), positions.end(), std::back_inserter(sample),
                    std::min<std::size_t>(settings.propagation_sample, trace.size()), rng);
    }

    std::vector<const BanManState*> ban_states;
    for (const auto& nd : nodes) ban_states.push_back(&nd.banman);
    const NaiveRelay naive;
    const ReputationRelay ours(
        settings.gossip, settings.admission,
        [&nodes](std::size_t node, const std::string& sender) { return nodes[node].reputation.score(sender); },
        settings.propagation_congested);

    PropagationReport report;
    report.overlay_salt = overlay->salt();
    double next_decay = static_cast<double>(trace[0].timestamp) + settings.reputation.epoch_s;
    std::size_t next_sample = 0;
    for (std::size_t pos = 0; pos < trace.size(); ++pos) {
        const auto& tx = trace[pos];
        const double now = static_cast<double>(tx.timestamp);
        while (next_decay <= now) {
            for (auto& nd : nodes) nd.reputation.decay_epoch(next_decay);
            next_decay += settings.reputation.epoch_s;
        }

        if (next_sample < sample.size() && sample[next_sample] == pos) {
            ++next_sample;
            Rng origin_rng = make_rng(seed, {kSaltOrigin, tx.tx_id});
            const auto origin = std::uniform_int_distribution<std::size_t>(0, n - 1)(origin_rng);
            const BanManRelay banman(ban_states, now);
            Rng r1 = make_rng(seed, {kSaltRelay, tx.tx_id, 0});
            Rng r2 = make_rng(seed, {kSaltRelay, tx.tx_id, 1});
            Rng r3 = make_rng(seed, {kSaltRelay, tx.tx_id, 2});
            report.naive.push_back(propagate(*overlay, tx, is_spam[pos], origin, naive, r1));
            report.banman.push_back(propagate(*overlay, tx, is_spam[pos], origin, banman, r2));
            report.ours.push_back(propagate(*overlay, tx, is_spam[pos], origin, ours, r3));
        }

        Rng obs = make_rng(seed, {kSaltObserve, tx.tx_id});
        for (auto& nd : nodes) {
            if (uniform01(obs) >= nd.observe_prob) continue;
            const auto verdict = nd.monitor.process(tx);
            nd.reputation.update(tx.sender, verdict, now);
            nd.banman.decide(tx, now);
        }
    }

    report.summaries = {summarize(PolicyKind::Naive, report.naive), summarize(PolicyKind::BanMan, report.banman),
                        summarize(PolicyKind::Ours, report.ours)};
    return report;
}

}  // namespace relayguard

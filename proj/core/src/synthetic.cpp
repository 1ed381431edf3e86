#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include "relayguard/config.hpp"
#include "relayguard/errors.hpp"
#include "relayguard/random.hpp"
#include "relayguard/trace.hpp"

namespace relayguard {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

struct PendingTx {
    double offset;  // seconds since profile start
    Transaction tx;
};

std::string random_address(Rng& rng, std::unordered_set<std::string>& taken) {
    while (true) {
        std::array<std::uint8_t, 20> bytes{};
        for (std::size_t i = 0; i < bytes.size(); i += 8) {
            const auto word = rng();
            for (std::size_t j = 0; j < 8 && i + j < bytes.size(); ++j) {
                bytes[i + j] = static_cast<std::uint8_t>(word >> (8 * j));
            }
        }
        std::string addr = "0x" + to_hex(bytes);
        if (taken.insert(addr).second) return addr;
    }
}

std::vector<std::uint8_t> random_payload(Rng& rng, std::size_t len) {
    std::vector<std::uint8_t> out(len);
    for (auto& b : out) b = static_cast<std::uint8_t>(rng());
    return out;
}

std::uint64_t lognormal_fee(Rng& rng, double mean, double sigma) {
    std::lognormal_distribution<double> dist(mean, sigma);
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(dist(rng))));
}

std::uint64_t lognormal_gas(Rng& rng, double median, double sigma, std::uint64_t floor) {
    std::lognormal_distribution<double> dist(std::log(median), sigma);
    return std::max<std::uint64_t>(floor, static_cast<std::uint64_t>(std::llround(dist(rng))));
}

/// Splits `total` as evenly as possible over `parts` buckets.
std::vector<std::uint64_t> even_split(std::uint64_t total, std::uint64_t parts) {
    std::vector<std::uint64_t> out(parts, parts ? total / parts : 0);
    for (std::uint64_t i = 0; parts && i < total % parts; ++i) ++out[i];
    return out;
}

}  // namespace

void SyntheticProfile::validate() const {
    auto fail = [](const std::string& why) { throw Error(Errc::InvalidProfile, "invalid profile: " + why); };
    if (n_senders == 0) fail("n_senders must be positive");
    if (n_transactions == 0) fail("n_transactions must be positive");
    if (!is_probability(spam_sender_fraction)) fail("spam_sender_fraction must lie in [0,1]");
    if (!is_probability(spam_revert_prob)) fail("spam_revert_prob must lie in [0,1]");
    if (!is_probability(honest_revert_prob)) fail("honest_revert_prob must lie in [0,1]");
    if (!is_probability(honest_transfer_fraction)) fail("honest_transfer_fraction must lie in [0,1]");
    if (!(spam_activity_ratio > 0.0)) fail("spam_activity_ratio must be positive");
    if (!(duration_s >= 1.0)) fail("duration_s must be at least 1");
    if (burst_size == 0) fail("burst_size must be positive");
    if (!(burst_interval_s > 0.0)) fail("burst_interval_s must be positive");
    if (!(burst_gap_s >= 0.0)) fail("burst_gap_s must be non-negative");
    if (spam_payload_pool == 0) fail("spam_payload_pool must be positive");
    if (!(honest_fee_sigma >= 0.0) || !(spam_fee_sigma >= 0.0)) fail("fee sigmas must be non-negative");
}

SyntheticProfile SyntheticProfile::from_config(const Config& cfg) {
    SyntheticProfile p;
    p.n_senders = cfg.get_u64("n_senders", p.n_senders);
    p.n_transactions = cfg.get_u64("n_transactions", p.n_transactions);
    p.spam_sender_fraction = cfg.get_double("spam_sender_fraction", p.spam_sender_fraction);
    p.spam_activity_ratio = cfg.get_double("spam_activity_ratio", p.spam_activity_ratio);
    p.duration_s = cfg.get_double("duration_s", p.duration_s);
    p.start_time = cfg.get_int("start_time", p.start_time);
    p.burst_size = cfg.get_u64("burst_size", p.burst_size);
    p.burst_interval_s = cfg.get_double("burst_interval_s", p.burst_interval_s);
    p.burst_gap_s = cfg.get_double("burst_gap_s", p.burst_gap_s);
    p.spam_payload_pool = cfg.get_u64("spam_payload_pool", p.spam_payload_pool);
    p.honest_fee_mean = cfg.get_double("honest_fee_mean", p.honest_fee_mean);
    p.honest_fee_sigma = cfg.get_double("honest_fee_sigma", p.honest_fee_sigma);
    p.spam_fee_mean = cfg.get_double("spam_fee_mean", p.spam_fee_mean);
    p.spam_fee_sigma = cfg.get_double("spam_fee_sigma", p.spam_fee_sigma);
    p.spam_revert_prob = cfg.get_double("spam_revert_prob", p.spam_revert_prob);
    p.honest_revert_prob = cfg.get_double("honest_revert_prob", p.honest_revert_prob);
    p.honest_transfer_fraction = cfg.get_double("honest_transfer_fraction", p.honest_transfer_fraction);
    p.seed = cfg.get_u64("seed", p.seed);
    return p;
}

void SyntheticProfile::describe(ResolvedConfig& out) const {
    out.add("n_senders", n_senders);
    out.add("n_transactions", n_transactions);
    out.add("spam_sender_fraction", spam_sender_fraction);
    out.add("spam_activity_ratio", spam_activity_ratio);
    out.add("duration_s", duration_s);
    out.add("start_time", start_time);
    out.add("burst_size", burst_size);
    out.add("burst_interval_s", burst_interval_s);
    out.add("burst_gap_s", burst_gap_s);
    out.add("spam_payload_pool", spam_payload_pool);
    out.add("honest_fee_mean", honest_fee_mean);
    out.add("honest_fee_sigma", honest_fee_sigma);
    out.add("spam_fee_mean", spam_fee_mean);
    out.add("spam_fee_sigma", spam_fee_sigma);
    out.add("spam_revert_prob", spam_revert_prob);
    out.add("honest_revert_prob", honest_revert_prob);
    out.add("honest_transfer_fraction", honest_transfer_fraction);
    out.add("seed", seed);
}

Trace generate_synthetic(const SyntheticProfile& p) {
    p.validate();

    auto n_spam = static_cast<std::uint64_t>(std::llround(static_cast<double>(p.n_senders) * p.spam_sender_fraction));
    n_spam = std::min(n_spam, p.n_senders);
    const std::uint64_t n_honest = p.n_senders - n_spam;

    std::uint64_t spam_total = 0;
    if (n_spam > 0) {
        const double spam_weight = static_cast<double>(n_spam) * p.spam_activity_ratio;
        const double share = spam_weight / (spam_weight + static_cast<double>(n_honest));
        spam_total = static_cast<std::uint64_t>(std::llround(static_cast<double>(p.n_transactions) * share));
    }
    const std::uint64_t honest_total = p.n_transactions - spam_total;

    Rng addr_rng = make_rng(p.seed, {1});
    std::unordered_set<std::string> taken;
    std::vector<PendingTx> pending;
    pending.reserve(p.n_transactions);

    const auto honest_counts = even_split(honest_total, n_honest);
    std::uint64_t honest_serial = 0;
    for (std::uint64_t s = 0; s < n_honest; ++s) {
        const std::string sender = random_address(addr_rng, taken);
        Rng rng = make_rng(p.seed, {2, s});
        std::uniform_real_distribution<double> when(0.0, p.duration_s);
        std::vector<double> offsets(honest_counts[s]);
        for (auto& o : offsets) o = std::floor(when(rng));
        std::sort(offsets.begin(), offsets.end());
        for (double offset : offsets) {
            Transaction tx;
            tx.sender = sender;
            tx.gas_price = lognormal_fee(rng, p.honest_fee_mean, p.honest_fee_sigma);
            if (uniform01(rng) < p.honest_transfer_fraction) {
                tx.calldata_hash = empty_digest();
                tx.calldata_len = 0;
                tx.gas_used = 21000;
            } else {
                const std::size_t words = 1 + static_cast<std::size_t>(rng() % 4);
                auto payload = random_payload(rng, 4 + 32 * words);
                // Embed a serial so honest payloads never collide.
                for (int i = 0; i < 8; ++i) payload[4 + static_cast<std::size_t>(i)] ^= static_cast<std::uint8_t>(honest_serial >> (8 * i));
                tx.calldata_hash = sha256(payload);
                tx.calldata_len = payload.size();
                tx.gas_used = lognormal_gas(rng, 120000.0, 0.5, 30000);
            }
            ++honest_serial;
            if (uniform01(rng) < p.honest_revert_prob) {
                tx.receipt_status = ReceiptStatus::Revert;
                tx.gas_used = std::max<std::uint64_t>(21000, tx.gas_used / 3);
            }
            pending.push_back({offset, std::move(tx)});
        }
    }

    const auto spam_counts = even_split(spam_total, n_spam);
    for (std::uint64_t s = 0; s < n_spam; ++s) {
        const std::string sender = random_address(addr_rng, taken);
        Rng rng = make_rng(p.seed, {3, s});
        std::vector<std::pair<Digest, std::uint64_t>> pool;
        for (std::uint64_t i = 0; i < p.spam_payload_pool; ++i) {
            auto payload = random_payload(rng, 4 + 32 * 2);
            pool.emplace_back(sha256(payload), payload.size());
        }

        const std::uint64_t count = spam_counts[s];
        const auto bursts = (count + p.burst_size - 1) / p.burst_size;
        const double campaign = static_cast<double>(bursts) * (p.burst_interval_s + p.burst_gap_s / 2.0);
        std::uniform_real_distribution<double> start_dist(0.0, std::max(0.0, p.duration_s - campaign));
        double burst_start = std::floor(start_dist(rng));

        std::uint64_t emitted = 0;
        while (emitted < count) {
            const auto in_burst = std::min<std::uint64_t>(p.burst_size, count - emitted);
            const auto& payload = pool[rng() % pool.size()];
            std::uniform_real_distribution<double> within(0.0, p.burst_interval_s);
            std::vector<double> offsets(in_burst);
            for (auto& o : offsets) o = std::min(std::floor(burst_start + within(rng)), p.duration_s - 1.0);
            std::sort(offsets.begin(), offsets.end());
            for (double offset : offsets) {
                Transaction tx;
                tx.sender = sender;
                tx.calldata_hash = payload.first;
                tx.calldata_len = payload.second;
                tx.gas_price = lognormal_fee(rng, p.spam_fee_mean, p.spam_fee_sigma);
                if (uniform01(rng) < p.spam_revert_prob) {
                    tx.receipt_status = ReceiptStatus::Revert;
                    tx.gas_used = lognormal_gas(rng, 32000.0, 0.2, 21000);
                } else {
                    tx.gas_used = lognormal_gas(rng, 90000.0, 0.25, 21000);
                }
                pending.push_back({offset, std::move(tx)});
            }
            emitted += in_burst;
            std::uniform_real_distribution<double> gap(0.0, p.burst_gap_s);
            burst_start += p.burst_interval_s + (p.burst_gap_s > 0.0 ? std::floor(gap(rng) + 0.5) : 0.0);
        }
    }

    std::stable_sort(pending.begin(), pending.end(),
                     [](const PendingTx& a, const PendingTx& b) { return a.offset < b.offset; });

    Trace trace;
    trace.source = TraceSource::Synthetic;
    trace.transactions.reserve(pending.size());
    std::uint64_t id = 0;
    for (auto& item : pending) {
        item.tx.timestamp = p.start_time + static_cast<std::int64_t>(item.offset);
        item.tx.tx_id = id++;
        trace.transactions.push_back(std::move(item.tx));
    }
    return trace;
}

}  // namespace relayguard

#include "relayguard/admission.hpp"

#include <algorithm>

#include "relayguard/config.hpp"
#include "relayguard/errors.hpp"

namespace relayguard {

void AdmissionConfig::validate() const {
    auto fail = [](const char* why) { throw Error(Errc::InvalidConfig, std::string("admission: ") + why); };
    if (!(tau_low >= 0.0 && tau_low < tau_high && tau_high <= 1.0)) fail("need 0 <= tau_low < tau_high <= 1");
    if (!(p_low_normal >= 0.0 && p_low_normal <= 1.0)) fail("p_low_normal must lie in [0,1]");
    if (!(congestion_threshold >= 0.0 && congestion_threshold <= 1.0)) fail("congestion_threshold must lie in [0,1]");
    if (!(queue_delay_s >= 0.0)) fail("queue_delay_s must be non-negative");
    if (mempool_capacity == 0) fail("mempool_capacity must be positive");
}

AdmissionConfig AdmissionConfig::from_config(const Config& cfg, const std::string& prefix) {
    AdmissionConfig c;
    c.tau_high = cfg.get_double(prefix + "tau_high", c.tau_high);
    c.tau_low = cfg.get_double(prefix + "tau_low", c.tau_low);
    c.queue_capacity = cfg.get_u64(prefix + "queue_capacity", c.queue_capacity);
    c.queue_delay_s = cfg.get_double(prefix + "queue_delay_s", c.queue_delay_s);
    c.congestion_threshold = cfg.get_double(prefix + "congestion_threshold", c.congestion_threshold);
    c.p_low_normal = cfg.get_double(prefix + "p_low_normal", c.p_low_normal);
    c.mempool_capacity = cfg.get_u64(prefix + "mempool_capacity", c.mempool_capacity);
    c.validate();
    return c;
}

void AdmissionConfig::describe(ResolvedConfig& out, const std::string& prefix) const {
    out.add(prefix + "tau_high", tau_high);
    out.add(prefix + "tau_low", tau_low);
    out.add(prefix + "queue_capacity", queue_capacity);
    out.add(prefix + "queue_delay_s", queue_delay_s);
    out.add(prefix + "congestion_threshold", congestion_threshold);
    out.add(prefix + "p_low_normal", p_low_normal);
    out.add(prefix + "mempool_capacity", mempool_capacity);
}

ReputationBand band_of(const AdmissionConfig& cfg, double score) noexcept {
    if (score >= cfg.tau_high) return ReputationBand::High;
    if (score >= cfg.tau_low) return ReputationBand::Moderate;
    return ReputationBand::Low;
}

namespace {

AdmissionDecision moderate_path(const AdmissionConfig& cfg, bool congested, std::size_t queue_len, double now) {
    if (!congested && queue_len == 0) return AdmissionDecision::accept();
    if (queue_len < cfg.queue_capacity) return AdmissionDecision::queue(now + cfg.queue_delay_s);
    return AdmissionDecision::drop(DropReason::QueueFull);
}

}  // namespace

AdmissionDecision decide(const AdmissionConfig& cfg, double score, bool congested, std::size_t queue_len,
                         double rng_draw, double now) {
    switch (band_of(cfg, score)) {
        case ReputationBand::High:
            return AdmissionDecision::accept();
        case ReputationBand::Moderate:
            return moderate_path(cfg, congested, queue_len, now);
        case ReputationBand::Low:
            // Sampled acceptance only on a calm node, so a low score never
            // beats a moderate one under the same conditions.
            if (!congested && queue_len == 0 && rng_draw < cfg.p_low_normal) return AdmissionDecision::accept();
            return AdmissionDecision::drop(DropReason::LowReputation);
    }
    return AdmissionDecision::drop(DropReason::LowReputation);
}

Mempool::Mempool(std::size_t capacity) : capacity_(capacity) {}

bool Mempool::insert(const MempoolEntry& entry) {
    if (full()) return false;
    entries_.push_back(entry);
    return true;
}

std::vector<MempoolEntry> Mempool::take(std::size_t n) {
    std::vector<MempoolEntry> out;
    n = std::min(n, entries_.size());
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(entries_.front());
        entries_.pop_front();
    }
    return out;
}

bool is_congested(const AdmissionConfig& cfg, const Mempool& mempool) noexcept {
    return mempool.fill_fraction() > cfg.congestion_threshold;
}

DelayQueue::DelayQueue(std::size_t capacity) : capacity_(capacity) {}

bool DelayQueue::push(const MempoolEntry& entry, double release_at) {
    if (entries_.size() >= capacity_) return false;
    entries_.push_back({entry, release_at});
    return true;
}

std::vector<QueuedEntry> DelayQueue::drain() {
    std::vector<QueuedEntry> out(entries_.begin(), entries_.end());
    entries_.clear();
    return out;
}

TickResult tick(DelayQueue& queue, Mempool& mempool, double now) {
    TickResult result;
    while (!queue.entries_.empty() && queue.entries_.front().release_at <= now) {
        const auto entry = queue.entries_.front().entry;
        queue.entries_.pop_front();
        if (mempool.insert(entry)) {
            result.released.push_back(entry);
        } else {
            result.dropped.push_back(entry);
        }
    }
    return result;
}

}  // namespace relayguard

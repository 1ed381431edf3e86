#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

namespace relayguard {

class Config;
class ResolvedConfig;

struct AdmissionConfig {
    double tau_high = 0.8;
    double tau_low = 0.2;
    std::uint64_t queue_capacity = 500;
    double queue_delay_s = 2.0;
    double congestion_threshold = 0.8;
    double p_low_normal = 0.1;
    std::uint64_t mempool_capacity = 5000;

    void validate() const;

    static AdmissionConfig from_config(const Config& cfg, const std::string& prefix = "admission.");
    void describe(ResolvedConfig& out, const std::string& prefix = "admission.") const;
};

enum class ReputationBand : std::uint8_t { Low, Moderate, High };

ReputationBand band_of(const AdmissionConfig& cfg, double score) noexcept;

enum class DropReason : std::uint8_t { LowReputation, QueueFull, Congested };

struct AdmissionDecision {
    enum class Kind : std::uint8_t { Drop = 0, Queue = 1, Accept = 2 };

    Kind kind = Kind::Drop;
    double release_at = 0.0;                        // Queue only
    DropReason reason = DropReason::LowReputation;  // Drop only

    static AdmissionDecision accept() { return {Kind::Accept, 0.0, DropReason::LowReputation}; }
    static AdmissionDecision queue(double release_at) { return {Kind::Queue, release_at, DropReason::LowReputation}; }
    static AdmissionDecision drop(DropReason why) { return {Kind::Drop, 0.0, why}; }

    /// Accept > Queue > Drop.
    int rank() const noexcept { return static_cast<int>(kind); }

    friend bool operator==(const AdmissionDecision&, const AdmissionDecision&) = default;
};

/// Reputation-banded admission.
///  - score >= tau_high: Accept.
///  - moderate band: Accept when the node is calm (not congested, queue
///    empty); otherwise Queue while the queue has room, else Drop(QueueFull).
///  - score < tau_low: Drop(LowReputation), except that a calm node accepts
///    a sampled fraction (rng_draw < p_low_normal).
/// `now` only stamps release_at for queued transactions.
AdmissionDecision decide(const AdmissionConfig& cfg, double score, bool congested, std::size_t queue_len,
                         double rng_draw, double now = 0.0);

struct MempoolEntry {
    std::uint64_t tx_id = 0;
    std::size_t ref = 0;      // caller-defined handle (e.g. trace position)
    bool background = false;  // pre-existing load not from the replayed trace
};

class Mempool {
public:
    explicit Mempool(std::size_t capacity);

    /// False (and no insertion) when full.
    bool insert(const MempoolEntry& entry);

    /// Removes up to `n` entries in arrival order.
    std::vector<MempoolEntry> take(std::size_t n);

    std::size_t size() const noexcept { return entries_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    bool full() const noexcept { return entries_.size() >= capacity_; }
    double fill_fraction() const noexcept {
        return static_cast<double>(entries_.size()) / static_cast<double>(capacity_);
    }

private:
    std::size_t capacity_;
    std::deque<MempoolEntry> entries_;
};

/// Congestion predicate: fill fraction strictly above the threshold.
bool is_congested(const AdmissionConfig& cfg, const Mempool& mempool) noexcept;

struct TickResult {
    std::vector<MempoolEntry> released;  // moved into the mempool
    std::vector<MempoolEntry> dropped;   // due but the mempool was full (Congested)
};

struct QueuedEntry {
    MempoolEntry entry;
    double release_at = 0.0;
};

/// Bounded FIFO delay queue for moderate-reputation transactions.
class DelayQueue {
public:
    explicit DelayQueue(std::size_t capacity);

    /// False when the queue is at capacity.
    bool push(const MempoolEntry& entry, double release_at);

    std::size_t size() const noexcept { return entries_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    bool empty() const noexcept { return entries_.empty(); }
    const std::deque<QueuedEntry>& entries() const noexcept { return entries_; }

    /// Removes every remaining entry (e.g. end-of-replay eviction).
    std::vector<QueuedEntry> drain();

private:
    friend TickResult tick(DelayQueue& queue, Mempool& mempool, double now);

    std::size_t capacity_;
    std::deque<QueuedEntry> entries_;
};

/// Releases every entry with release_at <= now, in FIFO order.
TickResult tick(DelayQueue& queue, Mempool& mempool, double now);

}  // namespace relayguard

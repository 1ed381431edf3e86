#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>

#include "relayguard/stats.hpp"
#include "relayguard/trace.hpp"

namespace relayguard {

class Config;
class ResolvedConfig;

struct MonitorConfig {
    std::uint64_t history_n = 20;
    double history_window_s = 60.0;
    double fee_percentile = 25.0;
    std::uint64_t fee_lookback = 1000;
    std::uint64_t revert_threshold = 4;
    std::uint64_t burst_k = 5;
    double burst_window_s = 3.0;
    std::uint64_t noninclusion_beta = 20;
    std::uint64_t noninclusion_threshold = 7;
    std::uint64_t spam_flag_min = 2;

    /// Throws Error(InvalidConfig) on a violated invariant.
    void validate() const;

    static MonitorConfig from_config(const Config& cfg, const std::string& prefix = "monitor.");
    void describe(ResolvedConfig& out, const std::string& prefix = "monitor.") const;
};

/// Outcome lookback for the revert-rate and non-inclusion rules.
inline constexpr std::size_t kOutcomeLookback = 10;

enum class InclusionKind : std::uint8_t { NotApplicable, Pending, Included };

struct HistoryEntry {
    std::uint64_t tx_id = 0;
    std::int64_t timestamp = 0;
    Digest calldata_hash{};
    bool has_calldata = false;
    std::uint64_t gas_price = 0;
    ReceiptStatus outcome = ReceiptStatus::Success;
    InclusionKind inclusion = InclusionKind::NotApplicable;
    std::uint64_t first_seen_block = 0;  // meaningful while Pending
};

/// Per-sender rolling window: keeps the last history_n entries or every
/// entry younger than history_window_s relative to the newest, whichever
/// set is larger. Entries are in arrival order.
struct SenderHistory {
    std::deque<HistoryEntry> entries;
};

enum class MonitorFlag : std::uint8_t {
    LowFee = 1u << 0,
    RedundantCalldata = 1u << 1,
    HighRevertRate = 1u << 2,
    BurstFrequency = 1u << 3,
    NonInclusion = 1u << 4,
};

struct SpamVerdict {
    std::uint8_t flags = 0;
    bool is_spam = false;

    bool has(MonitorFlag f) const noexcept { return (flags & static_cast<std::uint8_t>(f)) != 0; }
    int count() const noexcept { return __builtin_popcount(flags); }

    friend bool operator==(const SpamVerdict&, const SpamVerdict&) = default;
};

/// Node-local online classifier. observe() ingests a transaction into the
/// sender's window and the node-wide fee buffer; classify() then evaluates
/// the five behavioral rules against the updated state.
class BehaviorMonitor {
public:
    explicit BehaviorMonitor(MonitorConfig cfg = {});

    /// With `now_block` set the entry starts Pending(now_block) and feeds the
    /// non-inclusion rule; otherwise it is NotApplicable.
    void observe(const Transaction& tx, std::optional<std::uint64_t> now_block = std::nullopt);

    /// Precondition: `tx` is the newest entry of its sender (observe ran).
    SpamVerdict classify(const Transaction& tx) const;

    /// observe() followed by classify().
    SpamVerdict process(const Transaction& tx, std::optional<std::uint64_t> now_block = std::nullopt);

    /// Marks a pending entry as included, if it is still in the window.
    void mark_included(const std::string& sender, std::uint64_t tx_id);

    void set_block_height(std::uint64_t height) noexcept { block_height_ = height; }
    std::uint64_t block_height() const noexcept { return block_height_; }

    const SenderHistory* history(const std::string& sender) const;
    const RollingQuantile& fee_buffer() const noexcept { return fees_; }
    const MonitorConfig& config() const noexcept { return cfg_; }
    std::size_t sender_count() const noexcept { return histories_.size(); }

private:
    void trim(SenderHistory& h) const;

    MonitorConfig cfg_;
    std::unordered_map<std::string, SenderHistory> histories_;
    RollingQuantile fees_;
    std::uint64_t block_height_ = 0;
};

}  // namespace relayguard

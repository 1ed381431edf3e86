#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "relayguard/stats.hpp"
#include "relayguard/trace.hpp"

namespace relayguard {

class Config;
class ResolvedConfig;

enum class PolicyKind : std::uint8_t { Naive, FeeFilter, BanMan, Eip1559, Simd110, Ours };

std::string_view policy_name(PolicyKind kind) noexcept;

/// Accepts the CLI spellings: naive, fee, banman, eip1559, simd110, ours.
std::optional<PolicyKind> parse_policy(std::string_view name) noexcept;

enum class BinaryDecision : std::uint8_t { Drop, Accept };

BinaryDecision decide_naive(const Transaction& tx);

/// Drop iff gas_price < fee_p10 (strict).
BinaryDecision decide_fee_filter(const Transaction& tx, double fee_p10);

struct BanManConfig {
    std::uint64_t revert_points = 10;
    std::uint64_t low_fee_points = 1;
    std::uint64_t ban_threshold = 100;
    double ban_duration_s = 3600.0;

    static BanManConfig from_config(const Config& cfg, const std::string& prefix = "banman.");
    void describe(ResolvedConfig& out, const std::string& prefix = "banman.") const;
};

/// Point-based sender discouragement. Points accrue after acceptance; at
/// the threshold the sender is banned and its points reset.
class BanManState {
public:
    BanManState(BanManConfig cfg, double fee_p10) : cfg_(cfg), fee_p10_(fee_p10) {}

    BinaryDecision decide(const Transaction& tx, double now);

    bool is_banned(const std::string& sender, double now) const;
    std::uint64_t points(const std::string& sender) const;
    std::size_t ban_count() const noexcept { return bans_issued_; }

private:
    BanManConfig cfg_;
    double fee_p10_;
    std::unordered_map<std::string, std::uint64_t> misbehavior_;
    std::unordered_map<std::string, double> banned_until_;
    std::size_t bans_issued_ = 0;
};

struct Eip1559Config {
    std::uint64_t window = 1000;
    std::uint64_t warmup = 10;
    double percentile = 25.0;

    static Eip1559Config from_config(const Config& cfg, const std::string& prefix = "eip1559.");
    void describe(ResolvedConfig& out, const std::string& prefix = "eip1559.") const;
};

/// Dynamic fee floor: the rolling percentile of recent gas prices.
class Eip1559State {
public:
    explicit Eip1559State(Eip1559Config cfg = {});

    /// Drop iff the window holds >= warmup entries and the fee is below the
    /// current base fee. The fee is appended either way.
    BinaryDecision decide(const Transaction& tx);

    /// Current floor, or nullopt during warm-up.
    std::optional<double> base_fee() const;

    /// Appends a fee without deciding.
    void record(std::uint64_t gas_price) { window_.push(static_cast<double>(gas_price)); }

    const RollingQuantile& window() const noexcept { return window_; }

private:
    Eip1559Config cfg_;
    RollingQuantile window_;
};

struct Simd110Config {
    double window_s = 10.0;
    std::uint64_t cap = 5;
    double multiplier_step = 1.5;
    Eip1559Config base;  // local base fee machinery

    static Simd110Config from_config(const Config& cfg, const std::string& prefix = "simd110.");
    void describe(ResolvedConfig& out, const std::string& prefix = "simd110.") const;
};

/// Per-account congestion pricing: the fee required from a sender grows
/// geometrically with its usage above the cap in the trailing window.
class Simd110State {
public:
    explicit Simd110State(Simd110Config cfg = {});

    /// Accepted and dropped transactions both count toward usage.
    BinaryDecision decide(const Transaction& tx, double now);

    /// Fee a further transaction from `sender` at `now` must pay. Its usage
    /// counts that transaction itself, so the sixth one inside the window
    /// with cap 5 pays one escalation step.
    double required_fee(const std::string& sender, double now) const;
    std::size_t usage(const std::string& sender, double now) const;

private:
    void prune(std::deque<double>& times, double now) const;

    Simd110Config cfg_;
    Eip1559State base_;
    std::unordered_map<std::string, std::deque<double>> usage_;
};

/// Uniform Accept/Drop policy interface used by trace replay.
class BaselinePolicy {
public:
    virtual ~BaselinePolicy() = default;
    virtual BinaryDecision decide(const Transaction& tx, double now) = 0;
    virtual PolicyKind kind() const noexcept = 0;
};

struct BaselineSettings {
    BanManConfig banman;
    Eip1559Config eip1559;
    Simd110Config simd110;
};

/// Builds one of the five baselines; fee_p10 comes from whole-trace stats.
/// Throws std::invalid_argument for PolicyKind::Ours.
std::unique_ptr<BaselinePolicy> make_baseline(PolicyKind kind, const BaselineSettings& settings, double fee_p10);

}  // namespace relayguard

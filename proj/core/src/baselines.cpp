#include "relayguard/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "relayguard/config.hpp"
#include "relayguard/errors.hpp"

namespace relayguard {

std::string_view policy_name(PolicyKind kind) noexcept {
    switch (kind) {
        case PolicyKind::Naive: return "naive";
        case PolicyKind::FeeFilter: return "fee";
        case PolicyKind::BanMan: return "banman";
        case PolicyKind::Eip1559: return "eip1559";
        case PolicyKind::Simd110: return "simd110";
        case PolicyKind::Ours: return "ours";
    }
    return "?";
}

std::optional<PolicyKind> parse_policy(std::string_view name) noexcept {
    for (auto k : {PolicyKind::Naive, PolicyKind::FeeFilter, PolicyKind::BanMan, PolicyKind::Eip1559,
                   PolicyKind::Simd110, PolicyKind::Ours}) {
        if (policy_name(k) == name) return k;
    }
    return std::nullopt;
}

BinaryDecision decide_naive(const Transaction&) { return BinaryDecision::Accept; }

BinaryDecision decide_fee_filter(const Transaction& tx, double fee_p10) {
    return static_cast<double>(tx.gas_price) < fee_p10 ? BinaryDecision::Drop : BinaryDecision::Accept;
}

BanManConfig BanManConfig::from_config(const Config& cfg, const std::string& prefix) {
    BanManConfig c;
    c.revert_points = cfg.get_u64(prefix + "revert_points", c.revert_points);
    c.low_fee_points = cfg.get_u64(prefix + "low_fee_points", c.low_fee_points);
    c.ban_threshold = cfg.get_u64(prefix + "ban_threshold", c.ban_threshold);
    c.ban_duration_s = cfg.get_double(prefix + "ban_duration_s", c.ban_duration_s);
    if (c.ban_threshold == 0) throw Error(Errc::InvalidConfig, "banman: ban_threshold must be positive");
    if (!(c.ban_duration_s >= 0.0)) throw Error(Errc::InvalidConfig, "banman: ban_duration_s must be non-negative");
    return c;
}

void BanManConfig::describe(ResolvedConfig& out, const std::string& prefix) const {
    out.add(prefix + "revert_points", revert_points);
    out.add(prefix + "low_fee_points", low_fee_points);
    out.add(prefix + "ban_threshold", ban_threshold);
    out.add(prefix + "ban_duration_s", ban_duration_s);
}

bool BanManState::is_banned(const std::string& sender, double now) const {
    auto it = banned_until_.find(sender);
    return it != banned_until_.end() && now < it->second;
}

std::uint64_t BanManState::points(const std::string& sender) const {
    auto it = misbehavior_.find(sender);
    return it == misbehavior_.end() ? 0 : it->second;
}

BinaryDecision BanManState::decide(const Transaction& tx, double now) {
    if (is_banned(tx.sender, now)) return BinaryDecision::Drop;

    std::uint64_t add = 0;
    if (tx.reverted()) add += cfg_.revert_points;
    if (static_cast<double>(tx.gas_price) < fee_p10_) add += cfg_.low_fee_points;
    if (add > 0) {
        auto& pts = misbehavior_[tx.sender];
        pts += add;
        if (pts >= cfg_.ban_threshold) {
            banned_until_[tx.sender] = now + cfg_.ban_duration_s;
            pts = 0;
            ++bans_issued_;
        }
    }
    return BinaryDecision::Accept;
}

Eip1559Config Eip1559Config::from_config(const Config& cfg, const std::string& prefix) {
    Eip1559Config c;
    c.window = cfg.get_u64(prefix + "window", c.window);
    c.warmup = cfg.get_u64(prefix + "warmup", c.warmup);
    c.percentile = cfg.get_double(prefix + "percentile", c.percentile);
    if (c.window == 0) throw Error(Errc::InvalidConfig, prefix + "window must be positive");
    if (c.warmup == 0 || c.warmup > c.window) throw Error(Errc::InvalidConfig, prefix + "warmup must lie in [1, window]");
    if (!(c.percentile > 0.0 && c.percentile <= 100.0)) {
        throw Error(Errc::InvalidConfig, prefix + "percentile must lie in (0,100]");
    }
    return c;
}

void Eip1559Config::describe(ResolvedConfig& out, const std::string& prefix) const {
    out.add(prefix + "window", window);
    out.add(prefix + "warmup", warmup);
    out.add(prefix + "percentile", percentile);
}

Eip1559State::Eip1559State(Eip1559Config cfg) : cfg_(cfg), window_(cfg.window) {}

std::optional<double> Eip1559State::base_fee() const {
    if (window_.size() < cfg_.warmup) return std::nullopt;
    return window_.quantile(cfg_.percentile);
}

BinaryDecision Eip1559State::decide(const Transaction& tx) {
    const auto base = base_fee();
    const bool drop = base && static_cast<double>(tx.gas_price) < *base;
    record(tx.gas_price);
    return drop ? BinaryDecision::Drop : BinaryDecision::Accept;
}

Simd110Config Simd110Config::from_config(const Config& cfg, const std::string& prefix) {
    Simd110Config c;
    c.window_s = cfg.get_double(prefix + "window_s", c.window_s);
    c.cap = cfg.get_u64(prefix + "cap", c.cap);
    c.multiplier_step = cfg.get_double(prefix + "multiplier_step", c.multiplier_step);
    c.base = Eip1559Config::from_config(cfg, prefix + "base_");
    if (!(c.window_s > 0.0)) throw Error(Errc::InvalidConfig, "simd110: window_s must be positive");
    if (!(c.multiplier_step >= 1.0)) throw Error(Errc::InvalidConfig, "simd110: multiplier_step must be >= 1");
    return c;
}

void Simd110Config::describe(ResolvedConfig& out, const std::string& prefix) const {
    out.add(prefix + "window_s", window_s);
    out.add(prefix + "cap", cap);
    out.add(prefix + "multiplier_step", multiplier_step);
    base.describe(out, prefix + "base_");
}

Simd110State::Simd110State(Simd110Config cfg) : cfg_(cfg), base_(cfg.base) {}

void Simd110State::prune(std::deque<double>& times, double now) const {
    while (!times.empty() && now - times.front() >= cfg_.window_s) times.pop_front();
}

std::size_t Simd110State::usage(const std::string& sender, double now) const {
    auto it = usage_.find(sender);
    if (it == usage_.end()) return 0;
    std::size_t n = 0;
    for (double t : it->second) n += (now - t < cfg_.window_s) ? 1 : 0;
    return n;
}

double Simd110State::required_fee(const std::string& sender, double now) const {
    const double base = base_.base_fee().value_or(0.0);
    const auto u = usage(sender, now) + 1;
    const auto excess = u > cfg_.cap ? u - cfg_.cap : 0;
    return base * std::pow(cfg_.multiplier_step, static_cast<double>(excess));
}

BinaryDecision Simd110State::decide(const Transaction& tx, double now) {
    auto& times = usage_[tx.sender];
    prune(times, now);
    const double required = required_fee(tx.sender, now);
    times.push_back(now);
    base_.record(tx.gas_price);
    return static_cast<double>(tx.gas_price) < required ? BinaryDecision::Drop : BinaryDecision::Accept;
}

namespace {

class NaivePolicy final : public BaselinePolicy {
public:
    BinaryDecision decide(const Transaction& tx, double) override { return decide_naive(tx); }
    PolicyKind kind() const noexcept override { return PolicyKind::Naive; }
};

class FeeFilterPolicy final : public BaselinePolicy {
public:
    explicit FeeFilterPolicy(double p10) : p10_(p10) {}
    BinaryDecision decide(const Transaction& tx, double) override { return decide_fee_filter(tx, p10_); }
    PolicyKind kind() const noexcept override { return PolicyKind::FeeFilter; }

private:
    double p10_;
};

class BanManPolicy final : public BaselinePolicy {
public:
    BanManPolicy(BanManConfig cfg, double p10) : state_(cfg, p10) {}
    BinaryDecision decide(const Transaction& tx, double now) override { return state_.decide(tx, now); }
    PolicyKind kind() const noexcept override { return PolicyKind::BanMan; }

private:
    BanManState state_;
};

class Eip1559Policy final : public BaselinePolicy {
public:
    explicit Eip1559Policy(Eip1559Config cfg) : state_(cfg) {}
    BinaryDecision decide(const Transaction& tx, double) override { return state_.decide(tx); }
    PolicyKind kind() const noexcept override { return PolicyKind::Eip1559; }

private:
    Eip1559State state_;
};

class Simd110Policy final : public BaselinePolicy {
public:
    explicit Simd110Policy(Simd110Config cfg) : state_(cfg) {}
    BinaryDecision decide(const Transaction& tx, double now) override { return state_.decide(tx, now); }
    PolicyKind kind() const noexcept override { return PolicyKind::Simd110; }

private:
    Simd110State state_;
};

}  // namespace

std::unique_ptr<BaselinePolicy> make_baseline(PolicyKind kind, const BaselineSettings& settings, double fee_p10) {
    switch (kind) {
        case PolicyKind::Naive: return std::make_unique<NaivePolicy>();
        case PolicyKind::FeeFilter: return std::make_unique<FeeFilterPolicy>(fee_p10);
        case PolicyKind::BanMan: return std::make_unique<BanManPolicy>(settings.banman, fee_p10);
        case PolicyKind::Eip1559: return std::make_unique<Eip1559Policy>(settings.eip1559);
        case PolicyKind::Simd110: return std::make_unique<Simd110Policy>(settings.simd110);
        case PolicyKind::Ours: break;
    }
    throw std::invalid_argument("make_baseline: 'ours' is not a baseline");
}

}  // namespace relayguard

#include "relayguard/monitor.hpp"

#include <algorithm>
#include <stdexcept>

#include "relayguard/config.hpp"
#include "relayguard/errors.hpp"

namespace relayguard {

void MonitorConfig::validate() const {
    auto fail = [](const char* why) { throw Error(Errc::InvalidConfig, std::string("monitor: ") + why); };
    if (history_n == 0) fail("history_n must be at least 1");
    if (!(history_window_s > 0.0)) fail("history_window_s must be positive");
    if (!(fee_percentile > 0.0 && fee_percentile < 100.0)) fail("fee_percentile must lie in (0,100)");
    if (fee_lookback == 0) fail("fee_lookback must be positive");
    if (revert_threshold == 0 || burst_k == 0 || noninclusion_threshold == 0 || noninclusion_beta == 0) {
        fail("thresholds must be positive");
    }
    if (!(burst_window_s > 0.0)) fail("burst_window_s must be positive");
    if (spam_flag_min == 0) fail("spam_flag_min must be positive");
}

MonitorConfig MonitorConfig::from_config(const Config& cfg, const std::string& prefix) {
    MonitorConfig c;
    c.history_n = cfg.get_u64(prefix + "history_n", c.history_n);
    c.history_window_s = cfg.get_double(prefix + "history_window_s", c.history_window_s);
    c.fee_percentile = cfg.get_double(prefix + "fee_percentile", c.fee_percentile);
    c.fee_lookback = cfg.get_u64(prefix + "fee_lookback", c.fee_lookback);
    c.revert_threshold = cfg.get_u64(prefix + "revert_threshold", c.revert_threshold);
    c.burst_k = cfg.get_u64(prefix + "burst_k", c.burst_k);
    c.burst_window_s = cfg.get_double(prefix + "burst_window_s", c.burst_window_s);
    c.noninclusion_beta = cfg.get_u64(prefix + "noninclusion_beta", c.noninclusion_beta);
    c.noninclusion_threshold = cfg.get_u64(prefix + "noninclusion_threshold", c.noninclusion_threshold);
    c.spam_flag_min = cfg.get_u64(prefix + "spam_flag_min", c.spam_flag_min);
    c.validate();
    return c;
}

void MonitorConfig::describe(ResolvedConfig& out, const std::string& prefix) const {
    out.add(prefix + "history_n", history_n);
    out.add(prefix + "history_window_s", history_window_s);
    out.add(prefix + "fee_percentile", fee_percentile);
    out.add(prefix + "fee_lookback", fee_lookback);
    out.add(prefix + "revert_threshold", revert_threshold);
    out.add(prefix + "burst_k", burst_k);
    out.add(prefix + "burst_window_s", burst_window_s);
    out.add(prefix + "noninclusion_beta", noninclusion_beta);
    out.add(prefix + "noninclusion_threshold", noninclusion_threshold);
    out.add(prefix + "spam_flag_min", spam_flag_min);
}

BehaviorMonitor::BehaviorMonitor(MonitorConfig cfg) : cfg_(cfg), fees_((cfg.validate(), cfg.fee_lookback)) {}

void BehaviorMonitor::trim(SenderHistory& h) const {
    const std::int64_t newest = h.entries.back().timestamp;
    while (h.entries.size() > cfg_.history_n &&
           static_cast<double>(newest - h.entries.front().timestamp) >= cfg_.history_window_s) {
        h.entries.pop_front();
    }
}

void BehaviorMonitor::observe(const Transaction& tx, std::optional<std::uint64_t> now_block) {
    auto& h = histories_[tx.sender];
    HistoryEntry e;
    e.tx_id = tx.tx_id;
    e.timestamp = tx.timestamp;
    e.calldata_hash = tx.calldata_hash;
    e.has_calldata = tx.has_calldata();
    e.gas_price = tx.gas_price;
    e.outcome = tx.receipt_status;
    if (now_block) {
        e.inclusion = InclusionKind::Pending;
        e.first_seen_block = *now_block;
        block_height_ = std::max(block_height_, *now_block);
    }
    h.entries.push_back(e);
    trim(h);
    fees_.push(static_cast<double>(tx.gas_price));
}

SpamVerdict BehaviorMonitor::classify(const Transaction& tx) const {
    auto it = histories_.find(tx.sender);
    if (it == histories_.end() || it->second.entries.empty() || it->second.entries.back().tx_id != tx.tx_id) {
        throw std::logic_error("BehaviorMonitor::classify called before observe for this transaction");
    }
    const auto& entries = it->second.entries;
    std::uint8_t flags = 0;
    auto set = [&flags](MonitorFlag f) { flags |= static_cast<std::uint8_t>(f); };

    if (static_cast<double>(tx.gas_price) < fees_.quantile(cfg_.fee_percentile)) set(MonitorFlag::LowFee);

    if (tx.has_calldata()) {
        for (std::size_t i = 0; i + 1 < entries.size(); ++i) {
            if (entries[i].has_calldata && entries[i].calldata_hash == tx.calldata_hash) {
                set(MonitorFlag::RedundantCalldata);
                break;
            }
        }
    }

    const std::size_t lookback = std::min(kOutcomeLookback, entries.size());
    std::uint64_t reverts = 0;
    std::uint64_t stale = 0;
    for (std::size_t i = entries.size() - lookback; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (e.outcome == ReceiptStatus::Revert) ++reverts;
        if (e.inclusion == InclusionKind::Pending && block_height_ >= e.first_seen_block &&
            block_height_ - e.first_seen_block >= cfg_.noninclusion_beta) {
            ++stale;
        }
    }
    if (reverts >= cfg_.revert_threshold) set(MonitorFlag::HighRevertRate);
    if (stale >= cfg_.noninclusion_threshold) set(MonitorFlag::NonInclusion);

    std::uint64_t in_window = 0;
    for (auto e = entries.rbegin(); e != entries.rend(); ++e) {
        if (static_cast<double>(tx.timestamp - e->timestamp) >= cfg_.burst_window_s) break;
        ++in_window;
    }
    if (in_window >= cfg_.burst_k) set(MonitorFlag::BurstFrequency);

    SpamVerdict v;
    v.flags = flags;
    v.is_spam = static_cast<std::uint64_t>(v.count()) >= cfg_.spam_flag_min;
    return v;
}

SpamVerdict BehaviorMonitor::process(const Transaction& tx, std::optional<std::uint64_t> now_block) {
    observe(tx, now_block);
    return classify(tx);
}

void BehaviorMonitor::mark_included(const std::string& sender, std::uint64_t tx_id) {
    auto it = histories_.find(sender);
    if (it == histories_.end()) return;
    for (auto e = it->second.entries.rbegin(); e != it->second.entries.rend(); ++e) {
        if (e->tx_id == tx_id) {
            if (e->inclusion == InclusionKind::Pending) e->inclusion = InclusionKind::Included;
            return;
        }
    }
}

const SenderHistory* BehaviorMonitor::history(const std::string& sender) const {
    auto it = histories_.find(sender);
    return it == histories_.end() ? nullptr : &it->second;
}

}  // namespace relayguard

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "relayguard/trace.hpp"

namespace relayguard {

class Config;
class ResolvedConfig;

/// Thresholds of the offline ground-truth classifier.
struct LabelerConfig {
    std::uint64_t burst_count = 3;
    double burst_window_s = 5.0;
    double fee_percentile = 10.0;
    double gas_percentile = 10.0;

    static LabelerConfig from_config(const Config& cfg, const std::string& prefix = "labeler.");
    void describe(ResolvedConfig& out, const std::string& prefix = "labeler.") const;
};

/// Whole-trace statistics, computed once per trace.
struct DatasetStats {
    double fee_p10 = 0.0;
    double gas_used_p10 = 0.0;
    std::size_t trace_size = 0;
    std::uint64_t trace_fingerprint = 0;
};

struct LabelFlags {
    bool duplicate_calldata = false;
    bool reverted = false;
    bool low_fee = false;
    bool low_complexity = false;
    bool burst = false;
    int flag_count = 0;
    bool is_spam = false;

    friend bool operator==(const LabelFlags&, const LabelFlags&) = default;
};

/// Aligned with trace order; carries the tx_id of every row.
struct Labels {
    std::vector<std::uint64_t> tx_ids;
    std::vector<LabelFlags> flags;

    std::size_t size() const noexcept { return flags.size(); }
    std::size_t spam_count() const noexcept;
    double spam_share() const noexcept;
};

/// Throws Error(EmptyTrace) on an empty trace. The percentiles default to
/// the 10th; other values come from `cfg`.
DatasetStats compute_dataset_stats(const Trace& trace, const LabelerConfig& cfg = {});

/// Throws Error(StatsMismatch) when `stats` were computed from another trace.
Labels label_trace(const Trace& trace, const DatasetStats& stats, const LabelerConfig& cfg = {});

/// CSV: tx_id,duplicate_calldata,reverted,low_fee,low_complexity,burst,flag_count,is_spam
void write_labels(std::ostream& out, const Labels& labels);

/// Reads the format emitted by write_labels, skipping `#` comment lines.
Labels read_labels(std::istream& in);
Labels load_labels(const std::string& path);

/// Ground-truth spam flag per trace position. Throws Error(LabelMismatch)
/// when the label set does not cover exactly the trace's tx_ids.
std::vector<bool> align_labels(const Trace& trace, const Labels& labels);

}  // namespace relayguard

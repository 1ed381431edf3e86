#include "relayguard/labeler.hpp"

#include <charconv>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "relayguard/config.hpp"
#include "relayguard/errors.hpp"
#include "relayguard/stats.hpp"

namespace relayguard {

LabelerConfig LabelerConfig::from_config(const Config& cfg, const std::string& prefix) {
    LabelerConfig c;
    c.burst_count = cfg.get_u64(prefix + "burst_count", c.burst_count);
    c.burst_window_s = cfg.get_double(prefix + "burst_window_s", c.burst_window_s);
    c.fee_percentile = cfg.get_double(prefix + "fee_percentile", c.fee_percentile);
    c.gas_percentile = cfg.get_double(prefix + "gas_percentile", c.gas_percentile);
    if (c.burst_count == 0 || !(c.burst_window_s > 0.0)) {
        throw Error(Errc::InvalidConfig, "labeler burst thresholds must be positive");
    }
    if (!(c.fee_percentile >= 0.0 && c.fee_percentile <= 100.0) ||
        !(c.gas_percentile >= 0.0 && c.gas_percentile <= 100.0)) {
        throw Error(Errc::InvalidConfig, "labeler percentiles must lie in [0,100]");
    }
    return c;
}

void LabelerConfig::describe(ResolvedConfig& out, const std::string& prefix) const {
    out.add(prefix + "burst_count", burst_count);
    out.add(prefix + "burst_window_s", burst_window_s);
    out.add(prefix + "fee_percentile", fee_percentile);
    out.add(prefix + "gas_percentile", gas_percentile);
}

std::size_t Labels::spam_count() const noexcept {
    std::size_t n = 0;
    for (const auto& f : flags) n += f.is_spam ? 1 : 0;
    return n;
}

double Labels::spam_share() const noexcept {
    return flags.empty() ? 0.0 : static_cast<double>(spam_count()) / static_cast<double>(flags.size());
}

DatasetStats compute_dataset_stats(const Trace& trace, const LabelerConfig& cfg) {
    if (trace.empty()) throw Error(Errc::EmptyTrace, "dataset statistics of an empty trace");
    std::vector<double> fees, gas;
    fees.reserve(trace.size());
    gas.reserve(trace.size());
    for (const auto& tx : trace.transactions) {
        fees.push_back(static_cast<double>(tx.gas_price));
        gas.push_back(static_cast<double>(tx.gas_used));
    }
    DatasetStats stats;
    stats.fee_p10 = percentile(fees, cfg.fee_percentile);
    stats.gas_used_p10 = percentile(gas, cfg.gas_percentile);
    stats.trace_size = trace.size();
    stats.trace_fingerprint = trace_fingerprint(trace);
    return stats;
}

Labels label_trace(const Trace& trace, const DatasetStats& stats, const LabelerConfig& cfg) {
    if (stats.trace_size != trace.size() || stats.trace_fingerprint != trace_fingerprint(trace)) {
        throw Error(Errc::StatsMismatch, "dataset statistics were computed from a different trace");
    }

    std::unordered_map<Digest, std::uint32_t, DigestHash> calldata_freq;
    for (const auto& tx : trace.transactions) {
        if (tx.has_calldata()) ++calldata_freq[tx.calldata_hash];
    }

    Labels labels;
    labels.tx_ids.reserve(trace.size());
    labels.flags.reserve(trace.size());
    std::unordered_map<std::string, std::deque<std::int64_t>> recent;
    for (const auto& tx : trace.transactions) {
        LabelFlags f;
        f.duplicate_calldata = tx.has_calldata() && calldata_freq[tx.calldata_hash] >= 2;
        f.reverted = tx.reverted();
        f.low_fee = static_cast<double>(tx.gas_price) < stats.fee_p10;
        f.low_complexity = static_cast<double>(tx.gas_used) < stats.gas_used_p10;

        auto& times = recent[tx.sender];
        while (!times.empty() && static_cast<double>(tx.timestamp - times.front()) >= cfg.burst_window_s) {
            times.pop_front();
        }
        times.push_back(tx.timestamp);
        f.burst = times.size() >= cfg.burst_count;

        f.flag_count = int(f.duplicate_calldata) + int(f.reverted) + int(f.low_fee) + int(f.low_complexity) +
                       int(f.burst);
        f.is_spam = f.flag_count >= 2;
        labels.tx_ids.push_back(tx.tx_id);
        labels.flags.push_back(f);
    }
    return labels;
}

void write_labels(std::ostream& out, const Labels& labels) {
    out << "tx_id,duplicate_calldata,reverted,low_fee,low_complexity,burst,flag_count,is_spam\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto& f = labels.flags[i];
        out << labels.tx_ids[i] << ',' << int(f.duplicate_calldata) << ',' << int(f.reverted) << ','
            << int(f.low_fee) << ',' << int(f.low_complexity) << ',' << int(f.burst) << ',' << f.flag_count << ','
            << int(f.is_spam) << '\n';
    }
}

namespace {

[[noreturn]] void bad_label(std::size_t line_no, const std::string& why) {
    throw Error(Errc::LabelMismatch, "labels line " + std::to_string(line_no) + ": " + why);
}

}  // namespace

Labels read_labels(std::istream& in) {
    Labels labels;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line.rfind("tx_id,", 0) != 0) bad_label(line_no, "expected label header");
            header = true;
            continue;
        }
        std::uint64_t cols[8];
        std::size_t n = 0;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        while (n < 8) {
            auto [ptr, ec] = std::from_chars(p, end, cols[n]);
            if (ec != std::errc{}) bad_label(line_no, "non-numeric field");
            ++n;
            if (ptr == end) break;
            if (*ptr != ',') bad_label(line_no, "unexpected character");
            p = ptr + 1;
        }
        if (n != 8) bad_label(line_no, "expected 8 fields");
        LabelFlags f;
        f.duplicate_calldata = cols[1] != 0;
        f.reverted = cols[2] != 0;
        f.low_fee = cols[3] != 0;
        f.low_complexity = cols[4] != 0;
        f.burst = cols[5] != 0;
        f.flag_count = static_cast<int>(cols[6]);
        f.is_spam = cols[7] != 0;
        labels.tx_ids.push_back(cols[0]);
        labels.flags.push_back(f);
    }
    if (!header) throw Error(Errc::LabelMismatch, "label file has no header");
    return labels;
}

Labels load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::LabelMismatch, "cannot open label file '" + path + "'");
    return read_labels(in);
}

std::vector<bool> align_labels(const Trace& trace, const Labels& labels) {
    if (labels.size() != trace.size()) {
        throw Error(Errc::LabelMismatch, "label count " + std::to_string(labels.size()) +
                                             " does not match trace length " + std::to_string(trace.size()));
    }
    std::unordered_map<std::uint64_t, bool> by_id;
    by_id.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) by_id.emplace(labels.tx_ids[i], labels.flags[i].is_spam);
    std::vector<bool> out;
    out.reserve(trace.size());
    for (const auto& tx : trace.transactions) {
        auto it = by_id.find(tx.tx_id);
        if (it == by_id.end()) throw Error(Errc::LabelMismatch, "no label for tx_id " + std::to_string(tx.tx_id));
        out.push_back(it->second);
    }
    return out;
}

}  // namespace relayguard

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "relayguard/harness.hpp"

namespace relayguard {

enum class ReportFormat : std::uint8_t { Csv, Json };

std::optional<ReportFormat> parse_format(std::string_view name) noexcept;

/// Reproducibility header carried by every report. CSV renders it as
/// leading `# key=value` lines, JSON as a `meta` object.
struct ReportMeta {
    std::string version;
    std::string command_line;
    std::string config_fingerprint;
    std::optional<std::uint64_t> seed;  // absent for deterministic-only commands
    std::vector<std::pair<std::string, std::string>> extra;
};

/// Library version string (matches the CMake project version).
std::string_view library_version() noexcept;

/// Leading `# key=value` lines shared by every CSV output.
void write_csv_preamble(std::ostream& out, const ReportMeta& meta);

/// CSV columns: policy,spam_total,spam_accepted,honest_total,honest_dropped,fn_rate,fp_rate
void emit_replay(std::ostream& out, std::span<const ReplayMetrics> metrics, const ReportMeta& meta, ReportFormat fmt);

/// CSV columns: step,class,mean_reputation,std_reputation
void emit_evolution(std::ostream& out, const EvolutionResult& result, const ReportMeta& meta, ReportFormat fmt);

/// CSV: per-transaction rows `tx_id,is_spam,policy,reached,coverage`, with
/// the per-policy means in the preamble.
void emit_propagation(std::ostream& out, const PropagationReport& report, const ReportMeta& meta, ReportFormat fmt);

/// Writes `content` to `path`, or to stdout for "-". Throws
/// Error(SinkUnwritable) when the file cannot be written.
void write_sink(const std::string& path, std::string_view content);

}  // namespace relayguard

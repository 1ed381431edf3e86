#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "relayguard/digest.hpp"

namespace relayguard {

class Config;
class ResolvedConfig;

enum class ReceiptStatus : std::uint8_t { Revert = 0, Success = 1 };

/// One relayed transaction. The raw calldata is hashed at ingestion and
/// never kept; everything downstream only needs equality and length.
struct Transaction {
    std::int64_t timestamp = 0;  // Unix seconds
    std::string sender;          // lowercase 0x-prefixed 20-byte hex
    Digest calldata_hash{};
    std::uint64_t calldata_len = 0;
    std::uint64_t gas_price = 0;  // Gwei
    ReceiptStatus receipt_status = ReceiptStatus::Success;
    std::uint64_t gas_used = 0;
    std::uint64_t tx_id = 0;

    bool reverted() const noexcept { return receipt_status == ReceiptStatus::Revert; }
    bool has_calldata() const noexcept { return calldata_len != 0; }

    friend bool operator==(const Transaction&, const Transaction&) = default;
};

enum class TraceSource : std::uint8_t { CsvFile, Synthetic };

/// Transactions sorted by (timestamp, tx_id).
struct Trace {
    std::vector<Transaction> transactions;
    TraceSource source = TraceSource::CsvFile;

    std::size_t size() const noexcept { return transactions.size(); }
    bool empty() const noexcept { return transactions.empty(); }
    const Transaction& operator[](std::size_t i) const { return transactions[i]; }
};

/// Reads a CSV trace. Required header columns: timestamp, from_address,
/// calldata, gas_price, receipt_status, receipt_gas_used. Extra columns are
/// ignored except the optional tx_id / calldata_hash / calldata_len columns
/// written by write_trace, which carry a trace whose raw calldata was
/// already discarded. Lines starting with `#` are comments.
///
/// Throws Error with MalformedRow (message carries the line number),
/// MissingColumn, or EmptyTrace.
Trace parse_trace(std::istream& in);
Trace load_trace(const std::string& path);

/// Writes the trace with the six schema columns plus tx_id, calldata_hash
/// and calldata_len; the calldata column is left empty.
void write_trace(std::ostream& out, const Trace& trace);

/// Stable 64-bit fingerprint over every field of every transaction.
std::uint64_t trace_fingerprint(const Trace& trace);

/// Shape of a synthetic congestion-event trace. Honest senders emit spaced
/// transactions with unique calldata; spam senders run one campaign of
/// back-to-back bursts that replay a small pool of payloads.
struct SyntheticProfile {
    std::uint64_t n_senders = 2000;
    std::uint64_t n_transactions = 50000;
    double spam_sender_fraction = 0.05;
    /// Transactions per spam sender relative to an honest sender.
    double spam_activity_ratio = 31.0;
    double duration_s = 1650.0;
    std::int64_t start_time = 1651366800;  // 2022-05-01T01:00:00Z

    std::uint64_t burst_size = 10;
    double burst_interval_s = 3.0;
    /// Upper bound of the idle gap between consecutive bursts, seconds.
    double burst_gap_s = 0.0;
    std::uint64_t spam_payload_pool = 3;

    // Lognormal fee parameters, in natural-log Gwei.
    double honest_fee_mean = 3.9;
    double honest_fee_sigma = 0.5;
    double spam_fee_mean = 3.9;
    double spam_fee_sigma = 0.6;

    double spam_revert_prob = 0.03;
    double honest_revert_prob = 0.02;
    /// Share of honest transactions that are plain value transfers (empty
    /// calldata, 21000 gas).
    double honest_transfer_fraction = 0.2;

    std::uint64_t seed = 42;

    /// Throws Error(InvalidProfile) when an invariant is violated.
    void validate() const;

    static SyntheticProfile from_config(const Config& cfg);
    void describe(ResolvedConfig& out) const;
};

/// Deterministic for a fixed profile (including seed). Emits exactly
/// profile.n_transactions transactions, sorted, with tx_id equal to the
/// position in the trace.
Trace generate_synthetic(const SyntheticProfile& profile);

}  // namespace relayguard

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>

namespace relayguard {

class Config;
class ResolvedConfig;
struct SpamVerdict;

inline constexpr double kNeutralReputation = 0.5;

struct ReputationConfig {
    double alpha = 0.2;          // EWMA weight of the newest verdict
    double decay_lambda = 0.01;  // per-epoch pull toward neutral for idle senders
    double epoch_s = 60.0;

    void validate() const;

    static ReputationConfig from_config(const Config& cfg, const std::string& prefix = "reputation.");
    void describe(ResolvedConfig& out, const std::string& prefix = "reputation.") const;

    friend bool operator==(const ReputationConfig&, const ReputationConfig&) = default;
};

struct ReputationRecord {
    double score = kNeutralReputation;
    double last_seen = 0.0;

    friend bool operator==(const ReputationRecord&, const ReputationRecord&) = default;
};

/// Local per-sender score in [0,1]. Unknown senders read as neutral and are
/// not materialized by lookups.
class ReputationTable {
public:
    explicit ReputationTable(ReputationConfig cfg = {});

    /// EWMA toward 0 (spam) or 1 (benign), clipped to [0,1]. Returns the
    /// new score.
    double update(const std::string& sender, bool is_spam, double now);
    double update(const std::string& sender, const SpamVerdict& verdict, double now);

    /// Pulls every sender idle for at least one epoch toward neutral by
    /// decay_lambda. Senders seen within the epoch are left alone.
    void decay_epoch(double now);

    double score(const std::string& sender) const;
    bool contains(const std::string& sender) const { return records_.count(sender) != 0; }
    std::size_t size() const noexcept { return records_.size(); }

    const ReputationConfig& config() const noexcept { return cfg_; }
    const std::unordered_map<std::string, ReputationRecord>& records() const noexcept { return records_; }

    /// Text snapshot: a header line carrying the format version, the config
    /// and the record count, then one `sender,score,last_seen` line per
    /// record (sorted by sender), then `end`. Doubles use shortest
    /// round-trip notation so load(persist(t)) == t bit for bit.
    void persist(std::ostream& out) const;

    /// Throws Error(CorruptSnapshot) on any malformed or truncated input.
    static ReputationTable load(std::istream& in);

    friend bool operator==(const ReputationTable& a, const ReputationTable& b) {
        return a.cfg_ == b.cfg_ && a.records_ == b.records_;
    }

private:
    ReputationConfig cfg_;
    std::unordered_map<std::string, ReputationRecord> records_;
};

}  // namespace relayguard

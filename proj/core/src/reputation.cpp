#include "relayguard/reputation.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <vector>

#include "relayguard/config.hpp"
#include "relayguard/errors.hpp"
#include "relayguard/monitor.hpp"

namespace relayguard {

namespace {

constexpr const char* kSnapshotMagic = "relayguard-reputation";
constexpr int kSnapshotVersion = 1;

[[noreturn]] void corrupt(const std::string& why) {
    throw Error(Errc::CorruptSnapshot, "corrupt reputation snapshot: " + why);
}

double parse_double_field(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) corrupt("bad number '" + std::string(s) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

void ReputationConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::InvalidConfig, "reputation: alpha must lie in (0,1)");
    if (!(decay_lambda >= 0.0 && decay_lambda < 1.0)) {
        throw Error(Errc::InvalidConfig, "reputation: decay_lambda must lie in [0,1)");
    }
    if (!(epoch_s > 0.0)) throw Error(Errc::InvalidConfig, "reputation: epoch_s must be positive");
}

ReputationConfig ReputationConfig::from_config(const Config& cfg, const std::string& prefix) {
    ReputationConfig c;
    c.alpha = cfg.get_double(prefix + "alpha", c.alpha);
    c.decay_lambda = cfg.get_double(prefix + "decay_lambda", c.decay_lambda);
    c.epoch_s = cfg.get_double(prefix + "epoch_s", c.epoch_s);
    c.validate();
    return c;
}

void ReputationConfig::describe(ResolvedConfig& out, const std::string& prefix) const {
    out.add(prefix + "alpha", alpha);
    out.add(prefix + "decay_lambda", decay_lambda);
    out.add(prefix + "epoch_s", epoch_s);
    out.add(prefix + "neutral", kNeutralReputation);
}

ReputationTable::ReputationTable(ReputationConfig cfg) : cfg_(cfg) { cfg_.validate(); }

double ReputationTable::update(const std::string& sender, bool is_spam, double now) {
    auto [it, _] = records_.try_emplace(sender);
    auto& rec = it->second;
    const double target = is_spam ? 0.0 : 1.0;
    rec.score = std::clamp((1.0 - cfg_.alpha) * rec.score + cfg_.alpha * target, 0.0, 1.0);
    rec.last_seen = now;
    return rec.score;
}

double ReputationTable::update(const std::string& sender, const SpamVerdict& verdict, double now) {
    return update(sender, verdict.is_spam, now);
}

void ReputationTable::decay_epoch(double now) {
    if (cfg_.decay_lambda == 0.0) return;
    for (auto& [_, rec] : records_) {
        if (now - rec.last_seen >= cfg_.epoch_s) {
            rec.score = std::clamp(rec.score + cfg_.decay_lambda * (kNeutralReputation - rec.score), 0.0, 1.0);
        }
    }
}

double ReputationTable::score(const std::string& sender) const {
    auto it = records_.find(sender);
    return it == records_.end() ? kNeutralReputation : it->second.score;
}

void ReputationTable::persist(std::ostream& out) const {
    out << kSnapshotMagic << ' ' << kSnapshotVersion << " alpha=" << format_double(cfg_.alpha)
        << " decay_lambda=" << format_double(cfg_.decay_lambda) << " epoch_s=" << format_double(cfg_.epoch_s)
        << " records=" << records_.size() << '\n';
    std::vector<const std::pair<const std::string, ReputationRecord>*> sorted;
    sorted.reserve(records_.size());
    for (const auto& kv : records_) sorted.push_back(&kv);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->first < b->first; });
    for (const auto* kv : sorted) {
        out << kv->first << ',' << format_double(kv->second.score) << ',' << format_double(kv->second.last_seen)
            << '\n';
    }
    out << "end\n";
}

ReputationTable ReputationTable::load(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) corrupt("missing header");
    const auto head = split(line, ' ');
    if (head.size() != 6 || head[0] != kSnapshotMagic) corrupt("bad header");
    if (head[1] != std::to_string(kSnapshotVersion)) corrupt("unsupported version " + std::string(head[1]));

    auto keyed = [&](std::string_view field, std::string_view key) {
        if (field.substr(0, key.size()) != key) corrupt("expected " + std::string(key));
        return field.substr(key.size());
    };
    ReputationConfig cfg;
    cfg.alpha = parse_double_field(keyed(head[2], "alpha="));
    cfg.decay_lambda = parse_double_field(keyed(head[3], "decay_lambda="));
    cfg.epoch_s = parse_double_field(keyed(head[4], "epoch_s="));
    const auto count_text = keyed(head[5], "records=");
    std::size_t count = 0;
    {
        auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
        if (ec != std::errc{} || ptr != count_text.data() + count_text.size()) corrupt("bad record count");
    }
    try {
        cfg.validate();
    } catch (const Error&) {
        corrupt("config out of range");
    }

    ReputationTable table(cfg);
    for (std::size_t i = 0; i < count; ++i) {
        if (!std::getline(in, line)) corrupt("truncated after " + std::to_string(i) + " records");
        const auto fields = split(line, ',');
        if (fields.size() != 3 || fields[0].empty()) corrupt("bad record line");
        ReputationRecord rec;
        rec.score = parse_double_field(fields[1]);
        rec.last_seen = parse_double_field(fields[2]);
        if (!(rec.score >= 0.0 && rec.score <= 1.0)) corrupt("score out of [0,1]");
        if (!table.records_.emplace(std::string(fields[0]), rec).second) corrupt("duplicate sender");
    }
    if (!std::getline(in, line) || line != "end") corrupt("missing end marker");
    return table;
}

}  // namespace relayguard

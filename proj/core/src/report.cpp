#include "relayguard/report.hpp"

#include <fstream>
#include <iostream>
#include <ostream>

#include <json.hpp>

#include "relayguard/config.hpp"
#include "relayguard/errors.hpp"

#ifndef RELAYGUARD_VERSION
#define RELAYGUARD_VERSION "0.0.0"
#endif

namespace relayguard {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kRateDigits = 6;

Json json_meta(const ReportMeta& meta) {
    Json j;
    j["version"] = meta.version;
    j["command"] = meta.command_line;
    j["config_fingerprint"] = meta.config_fingerprint;
    if (meta.seed) j["seed"] = *meta.seed;
    for (const auto& [k, v] : meta.extra) j[k] = v;
    return j;
}

// Rates and means go through format_fixed so CSV and JSON agree digit for
// digit and never depend on the stream's float formatting.
double rounded(double v, int digits) { return std::stod(format_fixed(v, digits)); }

}  // namespace

std::optional<ReportFormat> parse_format(std::string_view name) noexcept {
    if (name == "csv") return ReportFormat::Csv;
    if (name == "json") return ReportFormat::Json;
    return std::nullopt;
}

std::string_view library_version() noexcept { return RELAYGUARD_VERSION; }

void write_csv_preamble(std::ostream& out, const ReportMeta& meta) {
    out << "# version=" << meta.version << '\n';
    out << "# command=" << meta.command_line << '\n';
    out << "# config_fingerprint=" << meta.config_fingerprint << '\n';
    if (meta.seed) out << "# seed=" << *meta.seed << '\n';
    for (const auto& [k, v] : meta.extra) out << "# " << k << '=' << v << '\n';
}

void emit_replay(std::ostream& out, std::span<const ReplayMetrics> metrics, const ReportMeta& meta, ReportFormat fmt) {
    if (fmt == ReportFormat::Csv) {
        write_csv_preamble(out, meta);
        out << "policy,spam_total,spam_accepted,honest_total,honest_dropped,fn_rate,fp_rate\n";
        for (const auto& m : metrics) {
            out << policy_name(m.policy) << ',' << m.spam_total << ',' << m.spam_accepted << ',' << m.honest_total
                << ',' << m.honest_dropped << ',' << format_fixed(m.fn_rate(), kRateDigits) << ','
                << format_fixed(m.fp_rate(), kRateDigits) << '\n';
        }
        return;
    }
    Json j;
    j["meta"] = json_meta(meta);
    Json rows = Json::array();
    for (const auto& m : metrics) {
        Json r;
        r["policy"] = policy_name(m.policy);
        r["spam_total"] = m.spam_total;
        r["spam_accepted"] = m.spam_accepted;
        r["honest_total"] = m.honest_total;
        r["honest_dropped"] = m.honest_dropped;
        r["fn_rate"] = rounded(m.fn_rate(), kRateDigits);
        r["fp_rate"] = rounded(m.fp_rate(), kRateDigits);
        r["decisions"] = {
            {"accepted", m.accepted},
            {"queued_released", m.queued_released},
            {"dropped_policy", m.dropped_policy},
            {"dropped_low_reputation", m.dropped_low_reputation},
            {"dropped_queue_full", m.dropped_queue_full},
            {"dropped_congested", m.dropped_congested},
            {"evicted_at_end", m.evicted_at_end},
        };
        rows.push_back(std::move(r));
    }
    j["replay"] = std::move(rows);
    out << j.dump(2) << '\n';
}

void emit_evolution(std::ostream& out, const EvolutionResult& result, const ReportMeta& meta, ReportFormat fmt) {
    if (fmt == ReportFormat::Csv) {
        write_csv_preamble(out, meta);
        out << "step,class,mean_reputation,std_reputation\n";
        for (const auto& r : result.rows) {
            out << r.step << ',' << role_name(r.role) << ',' << format_fixed(r.mean, kRateDigits) << ','
                << format_fixed(r.std, kRateDigits) << '\n';
        }
        return;
    }
    Json j;
    j["meta"] = json_meta(meta);
    Json rows = Json::array();
    for (const auto& r : result.rows) {
        rows.push_back({{"step", r.step},
                        {"class", role_name(r.role)},
                        {"peers", r.peers},
                        {"mean_reputation", rounded(r.mean, kRateDigits)},
                        {"std_reputation", rounded(r.std, kRateDigits)}});
    }
    j["evolution"] = std::move(rows);
    out << j.dump(2) << '\n';
}

void emit_propagation(std::ostream& out, const PropagationReport& report, const ReportMeta& meta, ReportFormat fmt) {
    const std::pair<PolicyKind, const std::vector<PropagationResult>*> series[] = {
        {PolicyKind::Naive, &report.naive}, {PolicyKind::BanMan, &report.banman}, {PolicyKind::Ours, &report.ours}};
    if (fmt == ReportFormat::Csv) {
        write_csv_preamble(out, meta);
        out << "# overlay_salt=" << report.overlay_salt << '\n';
        for (const auto& s : report.summaries) {
            out << "# mean_coverage." << policy_name(s.policy) << ".spam=" << format_fixed(s.spam_mean, kRateDigits)
                << '\n';
            out << "# mean_coverage." << policy_name(s.policy)
                << ".honest=" << format_fixed(s.honest_mean, kRateDigits) << '\n';
        }
        write_coverage_header(out);
        for (const auto& [kind, rows] : series) {
            for (const auto& r : *rows) write_coverage_row(out, r, kind);
        }
        return;
    }
    Json j;
    j["meta"] = json_meta(meta);
    j["overlay_salt"] = report.overlay_salt;
    Json summaries = Json::array();
    for (const auto& s : report.summaries) {
        summaries.push_back({{"policy", policy_name(s.policy)},
                             {"spam_count", s.spam_count},
                             {"honest_count", s.honest_count},
                             {"spam_mean_coverage", rounded(s.spam_mean, kRateDigits)},
                             {"honest_mean_coverage", rounded(s.honest_mean, kRateDigits)}});
    }
    j["summary"] = std::move(summaries);
    Json rows = Json::array();
    for (const auto& [kind, results] : series) {
        for (const auto& r : *results) {
            rows.push_back({{"tx_id", r.tx_id},
                            {"is_spam", r.is_spam},
                            {"policy", policy_name(kind)},
                            {"reached", r.reached},
                            {"coverage", rounded(r.coverage, kRateDigits)}});
        }
    }
    j["coverage"] = std::move(rows);
    out << j.dump(2) << '\n';
}

void write_sink(const std::string& path, std::string_view content) {
    if (path == "-") {
        std::cout << content;
        std::cout.flush();
        if (!std::cout) throw Error(Errc::SinkUnwritable, "cannot write to stdout");
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(Errc::SinkUnwritable, "cannot open '" + path + "' for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.close();
    if (!f) throw Error(Errc::SinkUnwritable, "failed writing '" + path + "'");
}

}  // namespace relayguard

#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relayguard/config.hpp"
#include "relayguard/errors.hpp"
#include "relayguard/harness.hpp"
#include "relayguard/labeler.hpp"
#include "relayguard/overlay.hpp"
#include "relayguard/report.hpp"
#include "relayguard/trace.hpp"

namespace relayguard::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::uint64_t seed = kDefaultSeed;
    std::string out = "-";
    std::string format = "csv";
};

void add_config_flags(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "Flat key=value config file ([section] headers allowed)");
    cmd->add_option("--set", o.overrides, "Override one config key (key=value); repeatable, wins over --config");
}

void add_seed_flag(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--seed", o.seed, "Master RNG seed")->capture_default_str();
}

void add_out_flag(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--out", o.out, "Output path, '-' for stdout")->capture_default_str();
}

void add_format_flag(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--format", o.format, "Report format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

Config load_config(const CommonOptions& o) {
    Config cfg;
    if (!o.config_path.empty()) cfg = Config::load_file(o.config_path);
    for (const auto& a : o.overrides) cfg.set_assignment(a);
    return cfg;
}

void reject_unused(const Config& cfg) {
    const auto unused = cfg.unused_keys();
    if (unused.empty()) return;
    std::string list;
    for (const auto& k : unused) list += (list.empty() ? "" : ", ") + k;
    throw Error(Errc::InvalidConfig, "unknown config key(s): " + list);
}

std::string join_command_line(int argc, const char* const* argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s.push_back(' ');
        s += argv[i];
    }
    return s;
}

class Emitter {
public:
    Emitter(std::ostream& out, std::string path) : out_(out), path_(std::move(path)) {}

    void emit(const std::string& content) const {
        if (path_ == "-") {
            out_ << content;
            out_.flush();
            return;
        }
        write_sink(path_, content);
    }

private:
    std::ostream& out_;
    std::string path_;
};

ReportMeta make_meta(const std::string& command_line, const ResolvedConfig& resolved,
                     std::optional<std::uint64_t> seed) {
    ReportMeta m;
    m.version = std::string(library_version());
    m.command_line = command_line;
    m.config_fingerprint = resolved.fingerprint();
    m.seed = seed;
    return m;
}

ReportFormat format_of(const CommonOptions& o) { return *parse_format(o.format); }

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Relay-layer spam mitigation toolkit: trace generation, labeling and experiments", "relayguard"};
    app.set_version_flag("--version", std::string(library_version()));
    app.require_subcommand(1);

    CommonOptions o;
    std::string profile_path, trace_path, labels_path, policy = "all", overlay_out;

    auto* gen = app.add_subcommand("gen-trace", "Generate a synthetic congestion-event trace");
    gen->add_option("--profile", profile_path, "Synthetic profile file (key=value)");
    gen->add_option("--set", o.overrides, "Override one profile key (key=value); repeatable");
    gen->add_option("--seed", o.seed, "Generator seed (overrides the profile)")->capture_default_str();
    add_out_flag(gen, o);

    auto* label = app.add_subcommand("label", "Label a trace with the offline spam heuristics");
    label->add_option("--trace", trace_path, "Input trace CSV")->required();
    add_config_flags(label, o);
    add_out_flag(label, o);

    auto* replay = app.add_subcommand("replay", "Replay a labeled trace through admission policies");
    replay->add_option("--trace", trace_path, "Input trace CSV")->required();
    replay->add_option("--labels", labels_path, "Labels CSV (default: label the trace in place)");
    replay->add_option("--policy", policy, "Policy to replay")
        ->check(CLI::IsMember({"all", "naive", "fee", "banman", "eip1559", "simd110", "ours"}))
        ->capture_default_str();
    add_config_flags(replay, o);
    add_seed_flag(replay, o);
    add_out_flag(replay, o);
    add_format_flag(replay, o);

    auto* rep = app.add_subcommand("rep-sim", "Simulate reputation evolution over scripted peers");
    add_config_flags(rep, o);
    add_seed_flag(rep, o);
    add_out_flag(rep, o);
    add_format_flag(rep, o);

    auto* gossip = app.add_subcommand("gossip-sim", "Measure propagation coverage over a random overlay");
    gossip->add_option("--trace", trace_path, "Input trace CSV")->required();
    gossip->add_option("--labels", labels_path, "Labels CSV (default: label the trace in place)");
    gossip->add_option("--overlay-out", overlay_out, "Also write the overlay edge list here");
    add_config_flags(gossip, o);
    add_seed_flag(gossip, o);
    add_out_flag(gossip, o);
    add_format_flag(gossip, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << library_version() << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        const CLI::App* sub = nullptr;
        for (const auto* s : app.get_subcommands()) sub = s;
        err << (sub ? sub->help() : app.help());
        return kExitUsage;
    }

    const auto command_line = join_command_line(argc, argv);
    const Emitter emitter(out, o.out);

    try {
        if (gen->parsed()) {
            Config cfg;
            if (!profile_path.empty()) cfg = Config::load_file(profile_path);
            for (const auto& a : o.overrides) cfg.set_assignment(a);
            auto profile = SyntheticProfile::from_config(cfg);
            reject_unused(cfg);
            profile.seed = o.seed;
            profile.validate();
            err << "seed=" << o.seed << '\n';
            ResolvedConfig resolved;
            profile.describe(resolved);
            const auto trace = generate_synthetic(profile);
            std::ostringstream s;
            write_csv_preamble(s, make_meta(command_line, resolved, o.seed));
            write_trace(s, trace);
            emitter.emit(s.str());
            return kExitOk;
        }

        if (label->parsed()) {
            auto cfg = load_config(o);
            const auto lc = LabelerConfig::from_config(cfg);
            reject_unused(cfg);
            ResolvedConfig resolved;
            lc.describe(resolved);
            const auto trace = load_trace(trace_path);
            const auto stats = compute_dataset_stats(trace, lc);
            const auto labels = label_trace(trace, stats, lc);
            auto meta = make_meta(command_line, resolved, std::nullopt);
            meta.extra = {{"trace_fingerprint", std::to_string(stats.trace_fingerprint)},
                          {"fee_p10", format_double(stats.fee_p10)},
                          {"gas_used_p10", format_double(stats.gas_used_p10)},
                          {"spam_share", format_fixed(labels.spam_share(), 6)}};
            std::ostringstream s;
            write_csv_preamble(s, meta);
            write_labels(s, labels);
            emitter.emit(s.str());
            return kExitOk;
        }

        // The three experiments share settings resolution.
        const auto cfg = load_config(o);
        const auto settings = ExperimentSettings::from_config(cfg);
        ResolvedConfig resolved;
        settings.describe(resolved);
        err << "seed=" << o.seed << '\n';

        auto load_inputs = [&](Trace& trace, std::vector<bool>& truth) {
            trace = load_trace(trace_path);
            const auto labels = labels_path.empty()
                                    ? label_trace(trace, compute_dataset_stats(trace, settings.labeler), settings.labeler)
                                    : load_labels(labels_path);
            truth = align_labels(trace, labels);
        };

        std::ostringstream s;
        if (replay->parsed()) {
            Trace trace;
            std::vector<bool> truth;
            load_inputs(trace, truth);
            std::vector<PolicyKind> kinds;
            if (policy == "all") {
                kinds = {PolicyKind::Naive, PolicyKind::FeeFilter, PolicyKind::BanMan,
                         PolicyKind::Eip1559, PolicyKind::Simd110, PolicyKind::Ours};
            } else {
                kinds = {*parse_policy(policy)};
            }
            resolved.add("replay.policy", policy);
            std::vector<ReplayMetrics> metrics;
            for (auto k : kinds) metrics.push_back(run_replay(trace, truth, k, settings, o.seed));
            auto meta = make_meta(command_line, resolved, o.seed);
            meta.extra = {{"trace_fingerprint", std::to_string(trace_fingerprint(trace))}};
            emit_replay(s, metrics, meta, format_of(o));
        } else if (rep->parsed()) {
            const auto result = run_reputation_evolution(settings, o.seed);
            auto meta = make_meta(command_line, resolved, o.seed);
            meta.extra = {{"class_mix", format_double(settings.mix_honest) + "/" + format_double(settings.mix_sybil) +
                                            "/" + format_double(settings.mix_reforming)}};
            emit_evolution(s, result, meta, format_of(o));
        } else if (gossip->parsed()) {
            Trace trace;
            std::vector<bool> truth;
            load_inputs(trace, truth);
            const auto overlay = build_overlay(settings.overlay_nodes, settings.overlay_degree, o.seed);
            if (!overlay_out.empty()) {
                std::ostringstream edges;
                overlay.write_edge_list(edges);
                write_sink(overlay_out, edges.str());
            }
            const auto report = run_propagation(trace, truth, settings, o.seed, &overlay);
            auto meta = make_meta(command_line, resolved, o.seed);
            meta.extra = {{"trace_fingerprint", std::to_string(trace_fingerprint(trace))}};
            emit_propagation(s, report, meta, format_of(o));
        }
        emitter.emit(s.str());
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << errc_name(e.code()) << ": " << e.what() << '\n';
        return kExitData;
    }
}

}  // namespace relayguard::cli

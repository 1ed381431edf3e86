#include <sstream>

#include <gtest/gtest.h>

#include "relayguard/config.hpp"
#include "relayguard/errors.hpp"
#include "relayguard/harness.hpp"
#include "relayguard/report.hpp"

using namespace relayguard;

namespace {

struct Fixture {
    Trace trace;
    Labels labels;
    std::vector<bool> spam;
};

const Fixture& small() {
    static const Fixture f = [] {
        SyntheticProfile p;
        p.n_transactions = 6000;
        p.n_senders = 400;
        p.duration_s = 200;
        p.seed = 5;
        Fixture x;
        x.trace = generate_synthetic(p);
        x.labels = label_trace(x.trace, compute_dataset_stats(x.trace));
        x.spam = align_labels(x.trace, x.labels);
        return x;
    }();
    return f;
}

std::string lines_after_comments(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] != '#') return line;
    }
    return {};
}

}  // namespace

TEST(Replay, NaiveAcceptsEverything) {
    const auto& f = small();
    const auto m = run_replay(f.trace, f.spam, PolicyKind::Naive, {}, 1);
    EXPECT_EQ(m.fn_rate(), 1.0);
    EXPECT_EQ(m.fp_rate(), 0.0);
    EXPECT_EQ(m.processed(), f.trace.size());
    EXPECT_EQ(m.spam_total, f.labels.spam_count());
}

TEST(Replay, EveryTransactionEndsAcceptedOrDropped) {
    const auto& f = small();
    for (auto k : {PolicyKind::Naive, PolicyKind::FeeFilter, PolicyKind::BanMan, PolicyKind::Eip1559,
                   PolicyKind::Simd110, PolicyKind::Ours}) {
        const auto m = run_replay(f.trace, f.labels, k, {}, 3);
        ASSERT_EQ(m.policy, k);
        EXPECT_EQ(m.accepted + m.dropped(), m.processed()) << policy_name(k);
        EXPECT_EQ(m.spam_accepted + (m.honest_total - m.honest_dropped), m.accepted) << policy_name(k);
        EXPECT_LE(m.queued_released, m.accepted);
        if (k != PolicyKind::Ours) { EXPECT_EQ(m.dropped(), m.dropped_policy); }
    }
}

TEST(Replay, FeeFilterMatchesDirectCount) {
    const auto& f = small();
    const auto stats = compute_dataset_stats(f.trace);
    std::size_t spam_pass = 0, honest_drop = 0;
    for (std::size_t i = 0; i < f.trace.size(); ++i) {
        const bool low = static_cast<double>(f.trace[i].gas_price) < stats.fee_p10;
        if (f.spam[i] && !low) ++spam_pass;
        if (!f.spam[i] && low) ++honest_drop;
    }
    const auto m = run_replay(f.trace, f.spam, PolicyKind::FeeFilter, {}, 1);
    EXPECT_EQ(m.spam_accepted, spam_pass);
    EXPECT_EQ(m.honest_dropped, honest_drop);
}

TEST(Replay, DeterministicAndLengthChecked) {
    const auto& f = small();
    const auto a = run_replay(f.trace, f.spam, PolicyKind::Ours, {}, 9);
    const auto b = run_replay(f.trace, f.spam, PolicyKind::Ours, {}, 9);
    EXPECT_EQ(a.accepted, b.accepted);
    EXPECT_EQ(a.spam_accepted, b.spam_accepted);
    EXPECT_EQ(a.honest_dropped, b.honest_dropped);
    auto shorter = f.spam;
    shorter.pop_back();
    try {
        run_replay(f.trace, shorter, PolicyKind::Ours, {}, 9);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::LabelMismatch);
    }
}

TEST(Settings, UnknownKeysRejected) {
    Config c;
    c.set("monitor.burst_k", "4");
    EXPECT_EQ(ExperimentSettings::from_config(c).monitor.burst_k, 4u);
    c.set("monitor.bogus", "1");
    EXPECT_THROW(ExperimentSettings::from_config(c), Error);
}

TEST(Evolution, DefaultMixSeparatesClasses) {
    const auto r = run_reputation_evolution({}, 1);
    ASSERT_TRUE(r.has(PeerRole::Honest));
    EXPECT_EQ(r.at(0, PeerRole::Sybil).mean, 0.5);
    EXPECT_EQ(r.at(0, PeerRole::Honest).peers, 40u);
    EXPECT_EQ(r.at(0, PeerRole::Reforming).peers, 20u);
    for (const auto& row : r.rows) {
        ASSERT_GE(row.mean, 0.0);
        ASSERT_LE(row.mean, 1.0);
        ASSERT_GE(row.std, 0.0);
    }
    EXPECT_GE(r.at(100, PeerRole::Honest).mean, 0.9);
    EXPECT_LE(r.at(100, PeerRole::Sybil).mean, 0.1);
    EXPECT_LE(r.at(50, PeerRole::Reforming).mean, 0.1);
    EXPECT_GE(r.at(100, PeerRole::Reforming).mean, 0.8);
}

TEST(Evolution, AllHonestNeverDeclines) {
    ExperimentSettings s;
    s.mix_honest = 1;
    s.mix_sybil = 0;
    s.mix_reforming = 0;
    const auto r = run_reputation_evolution(s, 2);
    EXPECT_FALSE(r.has(PeerRole::Sybil));
    EXPECT_THROW(r.at(1, PeerRole::Sybil), std::out_of_range);
    for (std::uint64_t step = 1; step <= s.evo_steps; ++step) {
        ASSERT_GE(r.at(step, PeerRole::Honest).mean, r.at(step - 1, PeerRole::Honest).mean);
    }
}

TEST(Evolution, MixMustSumToOne) {
    ExperimentSettings s;
    s.mix_honest = 0.5;
    try {
        run_reputation_evolution(s, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::InvalidMix);
    }
    s.mix_honest = 1.2;
    s.mix_sybil = -0.2;
    s.mix_reforming = 0;
    EXPECT_THROW(run_reputation_evolution(s, 1), Error);
}

TEST(Propagation, SmallOverlay) {
    const auto& f = small();
    ExperimentSettings s;
    s.overlay_nodes = 30;
    s.overlay_degree = 4;
    s.propagation_sample = 150;
    const auto r = run_propagation(f.trace, f.spam, s, 4);
    ASSERT_EQ(r.naive.size(), 150u);
    ASSERT_EQ(r.ours.size(), 150u);
    for (const auto& x : r.naive) EXPECT_EQ(x.coverage, 1.0);
    for (std::size_t i = 0; i < 150; ++i) {
        EXPECT_EQ(r.ours[i].tx_id, r.naive[i].tx_id);
        EXPECT_GE(r.ours[i].reached, 1u);
    }
    const auto& sum = r.summary(PolicyKind::Ours);
    EXPECT_EQ(sum.spam_count + sum.honest_count, 150u);
    const auto again = run_propagation(f.trace, f.spam, s, 4);
    EXPECT_EQ(again.ours, r.ours);
    EXPECT_EQ(again.banman, r.banman);
}

TEST(Report, CsvHeaders) {
    const auto& f = small();
    ReportMeta meta{"0.1.0", "test", "abc", 7, {}};
    std::ostringstream replay;
    const ReplayMetrics m[] = {run_replay(f.trace, f.spam, PolicyKind::Naive, {}, 1)};
    emit_replay(replay, m, meta, ReportFormat::Csv);
    EXPECT_EQ(lines_after_comments(replay.str()), "policy,spam_total,spam_accepted,honest_total,honest_dropped,fn_rate,fp_rate");
    EXPECT_NE(replay.str().find("# seed=7"), std::string::npos);

    ExperimentSettings s;
    s.evo_steps = 4;
    s.evo_switch_step = 2;
    std::ostringstream evo;
    emit_evolution(evo, run_reputation_evolution(s, 1), meta, ReportFormat::Csv);
    EXPECT_EQ(lines_after_comments(evo.str()), "step,class,mean_reputation,std_reputation");
    std::ostringstream evo2;
    emit_evolution(evo2, run_reputation_evolution(s, 1), meta, ReportFormat::Csv);
    EXPECT_EQ(evo.str(), evo2.str());

    std::ostringstream js;
    emit_replay(js, m, meta, ReportFormat::Json);
    EXPECT_EQ(js.str().front(), '{');
    EXPECT_NE(js.str().find("\"naive\""), std::string::npos);
}

TEST(Report, UnwritableSink) {
    try {
        write_sink("/nonexistent-dir/x/y.csv", "z");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::SinkUnwritable);
    }
}

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "relayguard/errors.hpp"
#include "relayguard/labeler.hpp"
#include "test_util.hpp"

using namespace relayguard;
using relayguard::testing::sender_of;
using relayguard::testing::TxBuilder;

namespace {

Trace make_trace(std::vector<Transaction> txs) {
    std::stable_sort(txs.begin(), txs.end(), [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    Trace t;
    t.transactions = std::move(txs);
    return t;
}

// Independent re-statement of the five rules over the whole trace.
std::vector<LabelFlags> oracle_labels(const Trace& t, const DatasetStats& st, const LabelerConfig& cfg) {
    std::vector<LabelFlags> out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto& x = t[i];
        LabelFlags f;
        if (x.calldata_len > 0) {
            int same = 0;
            for (std::size_t j = 0; j < t.size(); ++j) {
                if (t[j].calldata_len > 0 && t[j].calldata_hash == x.calldata_hash) ++same;
            }
            f.duplicate_calldata = same >= 2;
        }
        f.reverted = x.reverted();
        f.low_fee = static_cast<double>(x.gas_price) < st.fee_p10;
        f.low_complexity = static_cast<double>(x.gas_used) < st.gas_used_p10;
        std::uint64_t recent = 0;
        for (std::size_t j = 0; j <= i; ++j) {
            if (t[j].sender == x.sender && static_cast<double>(x.timestamp - t[j].timestamp) < cfg.burst_window_s) {
                ++recent;
            }
        }
        f.burst = recent >= cfg.burst_count;
        f.flag_count = f.duplicate_calldata + f.reverted + f.low_fee + f.low_complexity + f.burst;
        f.is_spam = f.flag_count >= 2;
        out.push_back(f);
    }
    return out;
}

}  // namespace

TEST(DatasetStats, Percentiles) {
    std::vector<Transaction> txs;
    for (int i = 1; i <= 10; ++i) txs.push_back(TxBuilder(i).at(i).fee(10 * i).gas(1000 * i));
    const auto st = compute_dataset_stats(make_trace(txs));
    EXPECT_EQ(st.fee_p10, 10);
    EXPECT_EQ(st.gas_used_p10, 1000);

    const auto single = compute_dataset_stats(make_trace({TxBuilder(0).fee(33).gas(44444)}));
    EXPECT_EQ(single.fee_p10, 33);
    EXPECT_EQ(single.gas_used_p10, 44444);

    std::vector<Transaction> same(20, TxBuilder(0).fee(5).gas(21000).build());
    for (std::size_t i = 0; i < same.size(); ++i) same[i].tx_id = i;
    const auto uni = compute_dataset_stats(make_trace(same));
    EXPECT_EQ(uni.fee_p10, 5);
    EXPECT_EQ(uni.gas_used_p10, 21000);

    EXPECT_THROW(compute_dataset_stats(Trace{}), Error);
}

TEST(LabelTrace, RevertPlusSharedCalldataIsSpam) {
    std::vector<Transaction> txs;
    for (int i = 0; i < 41; ++i) txs.push_back(TxBuilder(i).at(100 * i).from(sender_of(i)).payload("mint()"));
    txs[0] = TxBuilder(0).at(0).from(sender_of(0)).payload("mint()").revert();
    for (int i = 41; i < 60; ++i) txs.push_back(TxBuilder(i).at(100 * i).from(sender_of(i)).payload("u" + std::to_string(i)));
    const auto t = make_trace(txs);
    const auto labels = label_trace(t, compute_dataset_stats(t));
    const auto& f = labels.flags[0];
    EXPECT_TRUE(f.reverted);
    EXPECT_TRUE(f.duplicate_calldata);
    EXPECT_EQ(f.flag_count, 2);
    EXPECT_TRUE(f.is_spam);
}

TEST(LabelTrace, CleanTransactionHasNoFlags) {
    std::vector<Transaction> txs;
    for (int i = 0; i < 21; ++i) {
        txs.push_back(TxBuilder(i).at(100 * i).from(sender_of(i)).fee(10 + i).gas(30000 + 1000 * i).payload("p" + std::to_string(i)));
    }
    const auto t = make_trace(txs);
    const auto labels = label_trace(t, compute_dataset_stats(t));
    const auto& median = labels.flags[10];
    EXPECT_EQ(median.flag_count, 0);
    EXPECT_FALSE(median.is_spam);
}

TEST(LabelTrace, BurstWindowByHand) {
    std::vector<Transaction> txs;
    for (int i = 0; i < 4; ++i) txs.push_back(TxBuilder(i).at(i).payload("b" + std::to_string(i)));
    const auto t = make_trace(txs);
    const auto labels = label_trace(t, compute_dataset_stats(t));
    EXPECT_FALSE(labels.flags[0].burst);
    EXPECT_FALSE(labels.flags[1].burst);
    EXPECT_TRUE(labels.flags[2].burst);
    EXPECT_TRUE(labels.flags[3].burst);
}

TEST(LabelTrace, EmptyCalldataNeverDuplicates) {
    std::vector<Transaction> txs;
    for (int i = 0; i < 5; ++i) txs.push_back(TxBuilder(i).at(100 * i).from(sender_of(i)));
    const auto t = make_trace(txs);
    for (const auto& f : label_trace(t, compute_dataset_stats(t)).flags) EXPECT_FALSE(f.duplicate_calldata);
}

TEST(LabelTrace, StrictThresholds) {
    std::vector<Transaction> txs;
    for (int i = 1; i <= 10; ++i) txs.push_back(TxBuilder(i).at(100 * i).from(sender_of(i)).fee(10 * i).gas(1000 * i));
    const auto t = make_trace(txs);
    const auto labels = label_trace(t, compute_dataset_stats(t));
    // The minimum equals p10, so nothing is strictly below it.
    for (const auto& f : labels.flags) {
        EXPECT_FALSE(f.low_fee);
        EXPECT_FALSE(f.low_complexity);
    }
}

TEST(LabelTrace, StatsFromAnotherTraceRejected) {
    const auto a = make_trace({TxBuilder(0).fee(1), TxBuilder(1).at(1).fee(2)});
    const auto b = make_trace({TxBuilder(0).fee(1), TxBuilder(1).at(1).fee(3)});
    try {
        label_trace(a, compute_dataset_stats(b));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::StatsMismatch);
    }
}

TEST(LabelTrace, MatchesOracleOnRandomTraces) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<Transaction> txs;
        const int n = 20 + static_cast<int>(rng() % 150);
        for (int i = 0; i < n; ++i) {
            TxBuilder b(i);
            b.at(static_cast<std::int64_t>(rng() % 200)).from(sender_of(static_cast<int>(rng() % 12)));
            b.fee(1 + rng() % 60).gas(21000 + rng() % 60000);
            if (rng() % 4) b.payload("c" + std::to_string(rng() % 40));
            if (rng() % 10 == 0) b.revert();
            txs.push_back(b);
        }
        const auto t = make_trace(txs);
        const LabelerConfig cfg;
        const auto st = compute_dataset_stats(t, cfg);
        const auto got = label_trace(t, st, cfg);
        const auto want = oracle_labels(t, st, cfg);
        ASSERT_EQ(got.flags.size(), want.size());
        for (std::size_t i = 0; i < want.size(); ++i) ASSERT_EQ(got.flags[i], want[i]) << "trial " << trial << " row " << i;
        // Pure function.
        EXPECT_EQ(label_trace(t, st, cfg).flags, got.flags);
    }
}

TEST(LabelTrace, DuplicateFlagsSurvivePermutation) {
    SyntheticProfile p;
    p.n_transactions = 2000;
    p.n_senders = 100;
    const auto t = generate_synthetic(p);
    const auto base = label_trace(t, compute_dataset_stats(t));

    std::mt19937_64 rng(5);
    auto shuffled = t.transactions;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::stable_sort(shuffled.begin(), shuffled.end(), [](const auto& a, const auto& b) {
        return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.tx_id < b.tx_id;
    });
    Trace again;
    again.transactions = shuffled;
    const auto relabeled = label_trace(again, compute_dataset_stats(again));
    std::map<std::uint64_t, bool> dup;
    for (std::size_t i = 0; i < relabeled.size(); ++i) dup[relabeled.tx_ids[i]] = relabeled.flags[i].duplicate_calldata;
    for (std::size_t i = 0; i < base.size(); ++i) EXPECT_EQ(dup.at(base.tx_ids[i]), base.flags[i].duplicate_calldata);
}

TEST(LabelTrace, AddingACopyOnlyTurnsDuplicateOn) {
    std::vector<Transaction> txs;
    for (int i = 0; i < 30; ++i) txs.push_back(TxBuilder(i).at(i * 10).from(sender_of(i)).payload("d" + std::to_string(i % 20)));
    const auto t = make_trace(txs);
    const auto before = label_trace(t, compute_dataset_stats(t));
    auto more = txs;
    more.push_back(TxBuilder(30).at(400).from(sender_of(99)).payload("d15"));
    more.push_back(TxBuilder(31).at(401).from(sender_of(98)).payload("d3"));
    const auto t2 = make_trace(more);
    const auto after = label_trace(t2, compute_dataset_stats(t2));
    for (std::size_t i = 0; i < before.size(); ++i) {
        if (before.flags[i].duplicate_calldata) { EXPECT_TRUE(after.flags[i].duplicate_calldata); }
    }
    EXPECT_FALSE(before.flags[15].duplicate_calldata);
    EXPECT_TRUE(after.flags[15].duplicate_calldata);
}

TEST(Labels, WriteReadAlign) {
    SyntheticProfile p;
    p.n_transactions = 500;
    p.n_senders = 40;
    const auto t = generate_synthetic(p);
    const auto labels = label_trace(t, compute_dataset_stats(t));
    std::stringstream s;
    s << "# a comment\n";
    write_labels(s, labels);
    const auto back = read_labels(s);
    EXPECT_EQ(back.tx_ids, labels.tx_ids);
    EXPECT_EQ(back.flags, labels.flags);
    const auto truth = align_labels(t, back);
    ASSERT_EQ(truth.size(), t.size());
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(truth[i], labels.flags[i].is_spam);

    auto short_labels = labels;
    short_labels.tx_ids.pop_back();
    short_labels.flags.pop_back();
    EXPECT_THROW(align_labels(t, short_labels), Error);
}

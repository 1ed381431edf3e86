#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "relayguard/baselines.hpp"
#include "relayguard/labeler.hpp"
#include "test_util.hpp"

using namespace relayguard;
using relayguard::testing::TxBuilder;
using relayguard::testing::sender_of;
using D = BinaryDecision;

TEST(Policies, NamesRoundTrip) {
    for (auto k : {PolicyKind::Naive, PolicyKind::FeeFilter, PolicyKind::BanMan, PolicyKind::Eip1559,
                   PolicyKind::Simd110, PolicyKind::Ours}) {
        EXPECT_EQ(parse_policy(policy_name(k)), k);
    }
    EXPECT_FALSE(parse_policy("all").has_value());
    EXPECT_THROW(make_baseline(PolicyKind::Ours, {}, 1.0), std::invalid_argument);
}

TEST(FeeFilter, StrictBoundary) {
    EXPECT_EQ(decide_fee_filter(TxBuilder().fee(9), 10.0), D::Drop);
    EXPECT_EQ(decide_fee_filter(TxBuilder().fee(10), 10.0), D::Accept);
    EXPECT_EQ(decide_fee_filter(TxBuilder().fee(11), 10.0), D::Accept);
    EXPECT_EQ(decide_naive(TxBuilder().fee(0)), D::Accept);
}

TEST(FeeFilter, DropSetMatchesLabelerLowFeeFlag) {
    SyntheticProfile p;
    p.n_transactions = 5000;
    p.n_senders = 300;
    p.seed = 17;
    const auto trace = generate_synthetic(p);
    const auto stats = compute_dataset_stats(trace);
    const auto labels = label_trace(trace, stats);
    auto policy = make_baseline(PolicyKind::FeeFilter, {}, stats.fee_p10);
    std::size_t spam = 0, spam_passed = 0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const bool drop = policy->decide(trace[i], static_cast<double>(trace[i].timestamp)) == D::Drop;
        ASSERT_EQ(drop, labels.flags[i].low_fee) << i;
        if (labels.flags[i].is_spam) {
            ++spam;
            spam_passed += !labels.flags[i].low_fee;
        }
    }
    ASSERT_GT(spam, 0u);
}

TEST(BanMan, TenRevertsBanTheEleventh) {
    BanManState s({}, 5.0);
    const auto a = sender_of(1);
    for (int i = 0; i < 10; ++i) {
        EXPECT_EQ(s.decide(TxBuilder(i).from(a).fee(50).revert(), i), D::Accept) << i;
    }
    EXPECT_TRUE(s.is_banned(a, 10));
    EXPECT_EQ(s.points(a), 0u);
    EXPECT_EQ(s.ban_count(), 1u);
    EXPECT_EQ(s.decide(TxBuilder(10).from(a).fee(50), 10), D::Drop);
    EXPECT_EQ(s.decide(TxBuilder(11).from(sender_of(2)).fee(50), 10), D::Accept);
    // Ban placed at t=9 lasts 3600 s.
    EXPECT_EQ(s.decide(TxBuilder(12).from(a).fee(50), 3608.9), D::Drop);
    EXPECT_EQ(s.decide(TxBuilder(13).from(a).fee(50), 3609), D::Accept);
}

TEST(BanMan, LowFeePointsAccumulate) {
    BanManState s({}, 5.0);
    const auto a = sender_of(1);
    for (int i = 0; i < 99; ++i) s.decide(TxBuilder(i).from(a).fee(1), i);
    EXPECT_EQ(s.points(a), 99u);
    EXPECT_FALSE(s.is_banned(a, 99));
    s.decide(TxBuilder(99).from(a).fee(1), 99);
    EXPECT_TRUE(s.is_banned(a, 100));
}

TEST(BanMan, BanCountNeverDecreases) {
    std::mt19937_64 rng(3);
    BanManConfig cfg;
    cfg.ban_duration_s = 50;
    BanManState s(cfg, 20.0);
    std::size_t prev = 0;
    for (int i = 0; i < 20000; ++i) {
        auto b = TxBuilder(i).from(sender_of(static_cast<int>(rng() % 20))).fee(rng() % 40);
        if (rng() % 3 == 0) b.revert();
        s.decide(b, i * 0.5);
        ASSERT_GE(s.ban_count(), prev);
        prev = s.ban_count();
    }
    EXPECT_GT(prev, 0u);
}

TEST(Eip1559, WarmupAcceptsEverything) {
    Eip1559State s;
    for (int i = 0; i < 10; ++i) {
        EXPECT_FALSE(s.base_fee().has_value());
        EXPECT_EQ(s.decide(TxBuilder(i).fee(i == 9 ? 1 : 100)), D::Accept);
    }
    ASSERT_TRUE(s.base_fee().has_value());
}

TEST(Eip1559, FloorIsWindowPercentile) {
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<std::uint64_t> fee(10, 100);
    Eip1559State s;
    std::vector<double> fees;
    for (int i = 0; i < 1000; ++i) {
        const auto f = fee(rng);
        s.record(f);
        fees.push_back(static_cast<double>(f));
    }
    std::sort(fees.begin(), fees.end());
    const double expected = fees[static_cast<std::size_t>(std::ceil(0.25 * 1000)) - 1];
    ASSERT_EQ(*s.base_fee(), expected);
    EXPECT_GT(expected, 20.0);
    EXPECT_EQ(s.decide(TxBuilder().fee(20)), D::Drop);
    EXPECT_EQ(s.decide(TxBuilder().fee(static_cast<std::uint64_t>(expected))), D::Accept);
}

TEST(Eip1559, WindowForgetsOldFees) {
    Eip1559Config cfg;
    cfg.window = 20;
    Eip1559State s(cfg);
    for (int i = 0; i < 20; ++i) s.record(1000);
    EXPECT_EQ(*s.base_fee(), 1000.0);
    for (int i = 0; i < 20; ++i) s.record(5);
    EXPECT_EQ(*s.base_fee(), 5.0);
}

TEST(Simd110, SixthInsideWindowPaysOneStep) {
    Simd110State s;
    for (int i = 0; i < 10; ++i) s.decide(TxBuilder(i).from(sender_of(100 + i)).fee(40), 0);
    const double base = 40.0;
    const auto a = sender_of(1);
    for (int i = 0; i < 5; ++i) {
        EXPECT_DOUBLE_EQ(s.required_fee(a, 1.0 + i), base);
        EXPECT_EQ(s.decide(TxBuilder(20 + i).from(a).fee(40), 1.0 + i), D::Accept);
    }
    EXPECT_DOUBLE_EQ(s.required_fee(a, 6), base * 1.5);
    EXPECT_EQ(s.decide(TxBuilder(30).from(a).fee(59), 6), D::Drop);
    EXPECT_DOUBLE_EQ(s.required_fee(a, 7), base * 1.5 * 1.5);
    // Once the burst ages out of the 10 s window the price resets.
    EXPECT_EQ(s.usage(a, 15.5), 1u);
    EXPECT_DOUBLE_EQ(s.required_fee(a, 15.5), base);
}

TEST(Simd110, UsageWindowIsStrict) {
    Simd110State s;
    const auto a = sender_of(1);
    s.decide(TxBuilder(1).from(a), 0);
    EXPECT_EQ(s.usage(a, 9.999), 1u);
    EXPECT_EQ(s.usage(a, 10), 0u);
}

TEST(Baselines, FactoryReportsKind) {
    for (auto k : {PolicyKind::Naive, PolicyKind::FeeFilter, PolicyKind::BanMan, PolicyKind::Eip1559,
                   PolicyKind::Simd110}) {
        EXPECT_EQ(make_baseline(k, {}, 1.0)->kind(), k);
    }
}

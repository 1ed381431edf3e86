#include <random>

#include <gtest/gtest.h>

#include "relayguard/admission.hpp"
#include "relayguard/errors.hpp"

using namespace relayguard;
using Kind = AdmissionDecision::Kind;

TEST(Decide, Examples) {
    const AdmissionConfig cfg;
    EXPECT_EQ(decide(cfg, 0.9, true, 0, 0.5).kind, Kind::Accept);
    const auto low = decide(cfg, 0.1, true, 0, 0.0);
    EXPECT_EQ(low.kind, Kind::Drop);
    EXPECT_EQ(low.reason, DropReason::LowReputation);
    const auto full = decide(cfg, 0.5, true, cfg.queue_capacity, 0.5);
    EXPECT_EQ(full.kind, Kind::Drop);
    EXPECT_EQ(full.reason, DropReason::QueueFull);
    EXPECT_EQ(decide(cfg, 0.1, false, 0, 0.05).kind, Kind::Accept);
    EXPECT_EQ(decide(cfg, 0.1, false, 0, 0.15).kind, Kind::Drop);
}

TEST(Decide, ModerateBand) {
    const AdmissionConfig cfg;
    EXPECT_EQ(decide(cfg, 0.5, false, 0, 0.9).kind, Kind::Accept);
    const auto q = decide(cfg, 0.5, true, 3, 0.9, 10.0);
    EXPECT_EQ(q.kind, Kind::Queue);
    EXPECT_DOUBLE_EQ(q.release_at, 12.0);
    EXPECT_EQ(decide(cfg, 0.5, false, 1, 0.9).kind, Kind::Queue);
}

TEST(Decide, BandEdges) {
    const AdmissionConfig cfg;
    EXPECT_EQ(band_of(cfg, 0.8), ReputationBand::High);
    EXPECT_EQ(band_of(cfg, 0.2), ReputationBand::Moderate);
    EXPECT_EQ(band_of(cfg, 0.19999), ReputationBand::Low);
}

TEST(Decide, MonotoneInScoreAndTightenedByCongestion) {
    std::mt19937_64 rng(6);
    AdmissionConfig cfg;
    cfg.queue_capacity = 8;
    for (int i = 0; i < 200000; ++i) {
        const double r = std::uniform_real_distribution<double>()(rng);
        const double r2 = std::uniform_real_distribution<double>(r, 1.0)(rng);
        const bool congested = rng() % 2;
        const std::size_t q = rng() % 10;
        const double draw = std::uniform_real_distribution<double>()(rng);
        const auto a = decide(cfg, r, congested, q, draw);
        const auto b = decide(cfg, r2, congested, q, draw);
        ASSERT_LE(a.rank(), b.rank()) << r << " vs " << r2;
        ASSERT_LE(decide(cfg, r, true, q, draw).rank(), decide(cfg, r, false, q, draw).rank());
        if (a.kind == Kind::Queue) {
            ASSERT_EQ(band_of(cfg, r), ReputationBand::Moderate);
            ASSERT_LT(q, cfg.queue_capacity);
        }
    }
}

TEST(Decide, AllHighScoresBehaveLikeNaive) {
    const AdmissionConfig cfg;
    for (bool c : {false, true}) {
        for (std::size_t q : {0u, 1u, 500u}) EXPECT_EQ(decide(cfg, 0.8 + 0.2 * (q % 2), c, q, 0.99).kind, Kind::Accept);
    }
}

TEST(Config, AdmissionValidation) {
    AdmissionConfig c;
    c.tau_low = 0.9;
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.p_low_normal = 1.5;
    EXPECT_THROW(c.validate(), Error);
}

TEST(Mempool, CapacityAndFifoTake) {
    Mempool m(3);
    EXPECT_TRUE(m.insert({1, 0, false}));
    EXPECT_TRUE(m.insert({2, 0, false}));
    EXPECT_TRUE(m.insert({3, 0, false}));
    EXPECT_FALSE(m.insert({4, 0, false}));
    EXPECT_EQ(m.size(), 3u);
    const auto out = m.take(2);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].tx_id, 1u);
    EXPECT_EQ(out[1].tx_id, 2u);
    EXPECT_EQ(m.take(10).size(), 1u);
}

TEST(Mempool, CongestionIsStrictlyAboveThreshold) {
    AdmissionConfig cfg;
    cfg.mempool_capacity = 10;
    Mempool m(10);
    for (int i = 0; i < 8; ++i) m.insert({static_cast<std::uint64_t>(i), 0, false});
    EXPECT_FALSE(is_congested(cfg, m));
    m.insert({8, 0, false});
    EXPECT_TRUE(is_congested(cfg, m));
}

TEST(DelayQueue, ReleaseBoundaryAndFifo) {
    DelayQueue q(10);
    Mempool m(100);
    q.push({1, 0, false}, 12.0);
    EXPECT_TRUE(tick(q, m, 11.9).released.empty());
    const auto r = tick(q, m, 12.0);
    ASSERT_EQ(r.released.size(), 1u);
    EXPECT_EQ(r.released[0].tx_id, 1u);

    q.push({7, 0, false}, 5);
    q.push({8, 0, false}, 5);
    q.push({9, 0, false}, 5);
    const auto all = tick(q, m, 6);
    ASSERT_EQ(all.released.size(), 3u);
    EXPECT_EQ(all.released[0].tx_id, 7u);
    EXPECT_EQ(all.released[1].tx_id, 8u);
    EXPECT_EQ(all.released[2].tx_id, 9u);
    EXPECT_TRUE(q.empty());
}

TEST(DelayQueue, BoundedAndDropsIntoFullMempool) {
    DelayQueue q(2);
    EXPECT_TRUE(q.push({1, 0, false}, 0));
    EXPECT_TRUE(q.push({2, 0, false}, 0));
    EXPECT_FALSE(q.push({3, 0, false}, 0));
    Mempool m(1);
    const auto r = tick(q, m, 1);
    ASSERT_EQ(r.released.size(), 1u);
    ASSERT_EQ(r.dropped.size(), 1u);
    EXPECT_EQ(r.dropped[0].tx_id, 2u);
    EXPECT_EQ(m.size(), 1u);
}

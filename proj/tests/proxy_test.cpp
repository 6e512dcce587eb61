#include <fedzero/training/proxy.hpp>

#include <gtest/gtest.h>

#include <vector>

using namespace fedzero;

namespace {

ProxyModel model(std::size_t clients, ProxyConfig cfg = {}) {
    return ProxyModel(std::vector<double>(clients, 1.0 / static_cast<double>(clients)), cfg);
}

} // namespace

TEST(ProxyModel, WeightsFollowSampleCounts) {
    const std::vector<std::int64_t> samples{100, 300};
    const auto w = ProxyModel::weights_from_samples(samples);
    EXPECT_DOUBLE_EQ(w[0], 0.25);
    EXPECT_DOUBLE_EQ(w[1], 0.75);
}

TEST(ProxyModel, RejectsInvalidWeights) {
    EXPECT_THROW(ProxyModel({0.5, 0.6}, {}), std::invalid_argument);
    EXPECT_THROW(ProxyModel({1.0, 0.0}, {}), std::invalid_argument);
    EXPECT_THROW(ProxyModel({}, {}), std::invalid_argument);
}

TEST(ProxyModel, ZeroBatchesGiveNoLosses) {
    const auto m = model(3);
    EXPECT_TRUE(m.local_train(1, 0, 0).empty());
    EXPECT_EQ(m.local_train(1, 7, 0).size(), 7U);
}

TEST(ProxyModel, LossesAreDeterministicPerSeedClientAndRound) {
    ProxyConfig cfg;
    cfg.seed = 11;
    const auto a = model(4, cfg);
    const auto b = model(4, cfg);
    EXPECT_EQ(a.local_train(2, 5, 3), b.local_train(2, 5, 3));
    EXPECT_NE(a.local_train(2, 5, 3), a.local_train(2, 5, 4));
    cfg.seed = 12;
    EXPECT_NE(a.local_train(2, 5, 3), model(4, cfg).local_train(2, 5, 3));
}

TEST(ProxyModel, LossesDecayWithProgress) {
    auto m = model(2);
    const double before = mean_squared(m.local_train(0, 20, 0));
    const std::vector<AcceptedWork> work{{0, 20000}, {1, 20000}};
    m.aggregate(work);
    const double after = mean_squared(m.local_train(0, 20, 0));
    EXPECT_LT(after, before * 1e-6);
}

TEST(ProxyModel, EmptyRoundLeavesProgressUnchanged) {
    auto m = model(3);
    m.aggregate({});
    EXPECT_EQ(m.progress(), 0.0);
    EXPECT_EQ(m.accuracy(), 0.0);
}

TEST(ProxyModel, BroaderRoundsProgressAtLeastAsFast) {
    auto wide = model(10);
    auto narrow = model(10);
    std::vector<AcceptedWork> ten;
    for (std::size_t c = 0; c < 10; ++c) ten.push_back({c, 10});
    const std::vector<AcceptedWork> two{{0, 50}, {1, 50}};
    wide.aggregate(ten);
    narrow.aggregate(two);
    EXPECT_GE(wide.progress(), narrow.progress());
    // Weighted work is 10 · 0.1 · 10 = 10 in both; bonus 1 + coverage.
    EXPECT_NEAR(wide.progress(), 10.0 * 2.0, 1e-9);
    EXPECT_NEAR(narrow.progress(), 10.0 * 1.2, 1e-9);
}

TEST(ProxyModel, NoBonusMeansOnlyWeightedWorkCounts) {
    ProxyConfig cfg;
    cfg.diversity_bonus = 0.0;
    auto a = model(10, cfg);
    auto b = model(10, cfg);
    std::vector<AcceptedWork> ten;
    for (std::size_t c = 0; c < 10; ++c) ten.push_back({c, 10});
    const std::vector<AcceptedWork> two{{0, 50}, {1, 50}};
    a.aggregate(ten);
    b.aggregate(two);
    EXPECT_DOUBLE_EQ(a.progress(), b.progress());
}

TEST(ProxyModel, AccuracyIsMonotoneAndBounded) {
    auto m = model(5);
    double last = m.accuracy();
    for (int r = 0; r < 200; ++r) {
        const std::vector<AcceptedWork> work{{static_cast<std::size_t>(r % 5), 40}};
        m.aggregate(work);
        EXPECT_GE(m.accuracy(), last);
        EXPECT_LE(m.accuracy(), m.config().max_accuracy);
        last = m.accuracy();
    }
    m.aggregate(std::vector<AcceptedWork>{{0, 100000000}});
    EXPECT_NEAR(m.accuracy(), m.config().max_accuracy, 1e-12);
}

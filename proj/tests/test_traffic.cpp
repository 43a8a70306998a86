#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include <scma_ura/traffic.hpp>

using namespace scma_ura;

TEST(Traffic, ZeroRateNeverArrives)
{
    Rng rng(7);
    for (int i = 0; i < 1000; ++i)
        EXPECT_EQ(sample_arrivals({0.0, 1.0}, rng), 0);
}

TEST(Traffic, PoissonMeanAndZeroMass)
{
    Rng rng(11);
    constexpr int draws = 1'000'000;
    double sum = 0;
    int zeros = 0;
    for (int i = 0; i < draws; ++i) {
        const int x = sample_arrivals({4.0, 1.0}, rng);
        sum += x;
        zeros += x == 0;
    }
    const double mean = sum / draws;
    EXPECT_GE(mean, 3.99);
    EXPECT_LE(mean, 4.01);

    const double p0 = std::exp(-4.0);
    const double sigma = std::sqrt(p0 * (1 - p0) / draws);
    EXPECT_NEAR(static_cast<double>(zeros) / draws, p0, 3 * sigma);
}

TEST(Traffic, BarringEdgeCases)
{
    Rng rng(3);
    EXPECT_EQ(apply_barring(17, 1.0, rng), 17);
    EXPECT_EQ(apply_barring(0, 0.3, rng), 0);
    for (int i = 0; i < 100; ++i)
        EXPECT_LE(apply_barring(10, 0.4, rng), 10);
}

TEST(Traffic, BarringThinsAtAlpha)
{
    Rng rng(5);
    constexpr int n = 1'000'000;
    const int admitted = apply_barring(n, 0.5, rng);
    EXPECT_NEAR(static_cast<double>(admitted) / n, 0.5, 3 * std::sqrt(0.25 / n));
}

TEST(Traffic, SelectionBasics)
{
    Rng rng(1);
    const auto empty = select_codebooks(0, 6, rng);
    EXPECT_EQ(empty.counts, std::vector<int>(6, 0));

    const auto one = select_codebooks(1, 6, rng);
    int ones = 0;
    for (int v : one.counts)
        ones += v == 1;
    EXPECT_EQ(ones, 1);
    EXPECT_EQ(one.n_active, 1);

    for (int i = 0; i < 200; ++i) {
        const auto p = select_codebooks(i % 13, 10, rng);
        int sum = 0;
        for (int v : p.counts)
            sum += v;
        EXPECT_EQ(sum, p.n_active);
    }
}

TEST(Traffic, SelectionIsUniformChiSquare)
{
    constexpr int K = 10;
    Rng rng(99);
    std::vector<double> hits(K, 0);
    double users = 0;
    for (int s = 0; s < 100'000; ++s) {
        const auto p = select_codebooks(sample_arrivals({4.0, 1.0}, rng), K, rng);
        for (int k = 0; k < K; ++k)
            hits[k] += p.counts[k];
        users += p.n_active;
    }
    double chi2 = 0;
    const double expected = users / K;
    for (double h : hits)
        chi2 += (h - expected) * (h - expected) / expected;
    const boost::math::chi_squared dist(K - 1);
    EXPECT_LT(chi2, boost::math::quantile(boost::math::complement(dist, 0.001)));
}

TEST(Traffic, PerCodebookCountIsPoisson)
{
    // Thinning Poisson(lambda_bar) uniformly over K codebooks leaves each
    // codebook with Poisson(lambda_bar / K) users.
    constexpr int K = 6;
    constexpr int slots = 400'000;
    Rng rng(21);
    std::vector<int> hist(4, 0);
    for (int s = 0; s < slots; ++s) {
        const auto p = select_codebooks(sample_arrivals({3.0, 1.0}, rng), K, rng);
        ++hist[std::min(p.counts[2], 3)];
    }
    const double lam = 0.5;
    const double p0 = std::exp(-lam);
    const double p1 = lam * p0;
    EXPECT_NEAR(hist[0] / double(slots), p0, 4 * std::sqrt(p0 * (1 - p0) / slots));
    EXPECT_NEAR(hist[1] / double(slots), p1, 4 * std::sqrt(p1 * (1 - p1) / slots));
}

TEST(Traffic, ActivePatternOfWorkedExample)
{
    const auto f = builtin("f4x6");
    const auto a = active_pattern(SlotPattern({2, 1, 0, 0, 0, 1}), f);
    const std::vector<int> expected = {
        0, 1, 0, 0, 0, 0,
        2, 0, 0, 0, 0, 1,
        0, 1, 0, 0, 0, 1,
        2, 0, 0, 0, 0, 0,
    };
    EXPECT_EQ(a.matrix, expected);
    EXPECT_EQ(a.fn_load, (std::vector<int>{1, 3, 2, 2}));
}

TEST(Traffic, ActivePatternSpecialCases)
{
    const auto f = builtin("f4x6");
    const auto all = active_pattern(SlotPattern(std::vector<int>(6, 1)), f);
    for (int n = 0; n < 4; ++n)
        for (int k = 0; k < 6; ++k)
            EXPECT_EQ(all.at(n, k), f.at(n, k) ? 1 : 0);

    const auto none = active_pattern(SlotPattern(std::vector<int>(6, 0)), f);
    EXPECT_EQ(none.matrix, std::vector<int>(24, 0));

    EXPECT_THROW(active_pattern(SlotPattern({1, 1}), f), Error);
}

TEST(Traffic, ActivePatternIsLinear)
{
    const auto f = builtin("f6x15");
    Rng rng(8);
    for (int trial = 0; trial < 500; ++trial) {
        const auto a1 = select_codebooks(trial % 9, 15, rng);
        const auto a2 = select_codebooks(trial % 7, 15, rng);
        std::vector<int> sum(15);
        for (int k = 0; k < 15; ++k)
            sum[k] = a1.counts[k] + a2.counts[k];
        const auto m1 = active_pattern(a1, f);
        const auto m2 = active_pattern(a2, f);
        const auto ms = active_pattern(SlotPattern(sum), f);
        for (std::size_t i = 0; i < ms.matrix.size(); ++i)
            ASSERT_EQ(ms.matrix[i], m1.matrix[i] + m2.matrix[i]);
    }
}

TEST(Traffic, PatternRecoveryRejectsForeignMatrix)
{
    const auto f = builtin("f4x6");
    auto a = active_pattern(SlotPattern({2, 1, 0, 0, 0, 1}), f);
    EXPECT_EQ(pattern_of(a, f).counts, (std::vector<int>{2, 1, 0, 0, 0, 1}));
    a.at(0, 0) = 1; // codebook 1 does not use FN 1
    EXPECT_THROW(pattern_of(a, f), Error);
}

TEST(Traffic, ArrivalSchedule)
{
    EXPECT_EQ(arrival_schedule(1), 1);
    EXPECT_EQ(arrival_schedule(10), 1);
    EXPECT_EQ(arrival_schedule(20), 1);
    EXPECT_EQ(arrival_schedule(21), 2);
    EXPECT_EQ(arrival_schedule(30), 2);
    EXPECT_EQ(arrival_schedule(300), 15);
    EXPECT_THROW(arrival_schedule(0), Error);

    for (int t = 2; t <= 400; ++t) {
        const int step = arrival_schedule(t) - arrival_schedule(t - 1);
        EXPECT_EQ(step, (t > 20 && (t - 1) % 20 == 0) ? 1 : 0) << t;
    }
}

TEST(Traffic, ArrivalConfigValidation)
{
    EXPECT_NO_THROW((ArrivalConfig{2.0, 1.0}.validate()));
    EXPECT_THROW((ArrivalConfig{-1.0, 1.0}.validate()), Error);
    EXPECT_THROW((ArrivalConfig{1.0, 0.0}.validate()), Error);
    EXPECT_THROW((ArrivalConfig{1.0, 1.5}.validate()), Error);
}

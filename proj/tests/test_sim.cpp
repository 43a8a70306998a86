#include <gtest/gtest.h>

#include <cmath>

#include <scma_ura/sim.hpp>

using namespace scma_ura;

namespace {

SimConfig small_config()
{
    SimConfig c;
    c.replications = 8;
    c.slots_per_replication = 20'000;
    c.threads = 2;
    return c;
}

// standard error of a replication mean recovered from its 95% half-width
double std_error(const Estimate& e, int replications)
{
    const boost::math::students_t dist(replications - 1);
    return e.half_width / boost::math::quantile(boost::math::complement(dist, 0.025));
}

} // namespace

TEST(Sim, EmptySlot)
{
    const auto f = builtin("f6x15");
    const SlotRunner runner{&f};
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        const auto m = run_slot(runner, 0.0, rng);
        EXPECT_EQ(m.n_decoded, 0);
        EXPECT_EQ(m.n_active, 0);
        EXPECT_EQ(m.observed_idle, 15);
    }
}

TEST(Sim, ForcedWorkedExamples)
{
    const auto f = builtin("f4x6");
    const SlotRunner runner{&f};
    const auto collided = runner.run_forced(SlotPattern({2, 1, 0, 0, 0, 1}));
    EXPECT_EQ(collided.n_decoded, 2);
    EXPECT_EQ(collided.observed_idle, 2);
    EXPECT_EQ(collided.n_active, 4);

    const auto clean = runner.run_forced(SlotPattern({1, 1, 0, 1, 0, 0}));
    EXPECT_EQ(clean.n_decoded, 3);
    EXPECT_EQ(clean.n_decoded_ic, 3);
    EXPECT_EQ(clean.n_active, 3);
}

TEST(Sim, SlotCountsAreOrdered)
{
    const auto f = builtin("f5x10");
    const SlotRunner runner{&f};
    Rng rng(12);
    for (int i = 0; i < 20'000; ++i) {
        const auto m = runner.run(6.0, 0.7, rng);
        ASSERT_LE(m.n_decoded, m.n_active);
        ASSERT_LE(m.n_active, m.n_arrivals);
        ASSERT_LE(m.n_decoded_ic, m.n_decoded);
    }
}

TEST(Sim, BruteForceSmallCases)
{
    const auto f = builtin("f4x6");
    EXPECT_EQ(brute_force_expected_throughput(f, 0, DecoderPolicy::ComponentWise), 0.0);
    EXPECT_NEAR(brute_force_expected_throughput(f, 1, DecoderPolicy::ComponentWise), 1.0, 1e-12);
    // 30 of the 36 ordered pairs pick distinct codebooks and both decode
    EXPECT_NEAR(brute_force_expected_throughput(f, 2, DecoderPolicy::ComponentWise), 5.0 / 3.0, 1e-12);
    EXPECT_NEAR(brute_force_expected_throughput(f, 2, DecoderPolicy::JmpaOnly), 5.0 / 3.0, 1e-12);
}

TEST(Sim, CompositionWeightsMatchSelections)
{
    const auto f = builtin("f4x6");
    for (int n = 0; n <= 5; ++n) {
        double by_selection = 0;
        long long patterns = 0;
        for_each_selection(6, n, [&](const std::vector<int>& choice) {
            std::vector<int> counts(6, 0);
            for (int c : choice)
                ++counts[c];
            by_selection += decode(SlotPattern(counts), f).n_decoded;
            ++patterns;
        });
        double total_weight = 0;
        for_each_composition(6, n, [&](const std::vector<int>&, double w) { total_weight += w; });
        EXPECT_NEAR(total_weight, 1.0, 1e-12);
        EXPECT_NEAR(brute_force_expected_throughput(f, n, DecoderPolicy::ComponentWise), by_selection / patterns, 1e-12) << n;
    }
}

TEST(Sim, EnumerationLimit)
{
    try {
        for_each_selection(15, 7, [](const std::vector<int>&) {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TooLarge);
    }
    EXPECT_NO_THROW(for_each_selection(4, 8, [](const std::vector<int>&) {}));
}

TEST(Sim, MonteCarloMatchesTwoUserEnumeration)
{
    const auto f = builtin("f4x6");
    const SlotRunner runner{&f};
    Rng rng(8080);
    constexpr int slots = 200'000;
    double sum = 0;
    double sq = 0;
    for (int s = 0; s < slots; ++s) {
        const auto d = runner.run_forced(select_codebooks(2, 6, rng)).n_decoded;
        sum += d;
        sq += d * d;
    }
    const double mean = sum / slots;
    const double se = std::sqrt((sq / slots - mean * mean) / slots);
    EXPECT_NEAR(mean, 5.0 / 3.0, 3 * se);
}

TEST(Sim, PoissonizationConsistency)
{
    const auto f = builtin("f4x6");
    auto cfg = small_config();
    cfg.replications = 10;
    const std::vector<double> loads{1.0, 2.0, 3.0};
    const auto sweep = run_sweep(cfg, f, loads);
    for (std::size_t i = 0; i < loads.size(); ++i) {
        const double exact = poisson_mixed_throughput(f, loads[i], DecoderPolicy::ComponentWise);
        const auto& est = sweep.points[i].throughput;
        EXPECT_NEAR(est.mean, exact, 3 * std_error(est, cfg.replications)) << loads[i];
    }
}

TEST(Sim, ConfidenceIntervalSummary)
{
    const auto e = summarize({1.0, 2.0, 3.0});
    EXPECT_DOUBLE_EQ(e.mean, 2.0);
    // t_{0.975, 2} = 4.302653
    EXPECT_NEAR(e.half_width, 4.302653 / std::sqrt(3.0), 1e-5);
    EXPECT_TRUE(std::isnan(summarize({4.0}).half_width));
}

TEST(Sim, DeterministicAcrossThreadCounts)
{
    const auto f = builtin("f5x10");
    auto cfg = small_config();
    cfg.slots_per_replication = 5'000;
    const std::vector<double> loads{2.0, 4.0, 6.0};
    cfg.threads = 1;
    const auto a = run_sweep(cfg, f, loads);
    cfg.threads = 4;
    const auto b = run_sweep(cfg, f, loads);
    const auto c = run_sweep(cfg, f, loads);
    for (std::size_t i = 0; i < loads.size(); ++i) {
        EXPECT_EQ(a.points[i].throughput.mean, b.points[i].throughput.mean);
        EXPECT_EQ(a.points[i].throughput.half_width, b.points[i].throughput.half_width);
        EXPECT_EQ(a.points[i].p_idle.mean, b.points[i].p_idle.mean);
        EXPECT_EQ(b.points[i].throughput.mean, c.points[i].throughput.mean);
    }

    cfg.seed = 2;
    EXPECT_NE(run_sweep(cfg, f, loads).points[1].throughput.mean, a.points[1].throughput.mean);
}

TEST(Sim, BarringCampaignIsDeterministic)
{
    const auto f = builtin("f6x15");
    const auto table = build_load_table(f.params());
    SimConfig cfg;
    cfg.arrival = ArrivalMode::Schedule;
    cfg.barring = true;
    cfg.n_frames = 60;
    const auto a = run_barring_campaign(cfg, f, table);
    const auto b = run_barring_campaign(cfg, f, table);
    ASSERT_EQ(a.history.size(), 60u);
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        EXPECT_EQ(a.history[i].alpha, b.history[i].alpha);
        EXPECT_EQ(a.history[i].t_obs, b.history[i].t_obs);
        EXPECT_EQ(a.history[i].lambda_bar_true, arrival_schedule(static_cast<int>(i) + 1));
    }
}

TEST(Sim, BarringOffKeepsAlphaAtOne)
{
    const auto f = builtin("f6x15");
    const auto table = build_load_table(f.params());
    SimConfig cfg;
    cfg.arrival = ArrivalMode::Fixed;
    cfg.rate = 12.0;
    cfg.n_frames = 20;
    for (const auto& r : run_barring_campaign(cfg, f, table).history)
        EXPECT_EQ(r.alpha, 1.0);
}

TEST(Sim, SingleGroupEqualsSweep)
{
    const auto f = builtin("f5x10");
    const auto cfg = small_config();
    const auto g = run_groups(cfg, f, 1, 4.0);
    const auto s = run_sweep(cfg, f, {4.0});
    EXPECT_EQ(g.aggregate.mean, s.points[0].throughput.mean);
    EXPECT_EQ(g.aggregate.half_width, s.points[0].throughput.half_width);
}

TEST(Sim, GroupAdditivity)
{
    const auto f = builtin("f5x10");
    const auto cfg = small_config();
    const auto g = run_groups(cfg, f, 4, 16.0);
    EXPECT_NEAR(g.aggregate.mean, 8.4, 0.4);
    ASSERT_EQ(g.group_means.size(), 4u);

    const auto single = run_sweep(cfg, f, {4.0}).points[0].throughput;
    const double combined = std::sqrt(g.aggregate.half_width * g.aggregate.half_width
        + 16 * single.half_width * single.half_width);
    EXPECT_NEAR(g.aggregate.mean, 4 * single.mean, combined + 1e-12);
}

TEST(Sim, ConfigValidation)
{
    SimConfig c;
    c.replications = 1;
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.initial_alpha = 0.0;
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.rate = -1.0;
    EXPECT_THROW(c.validate(), Error);
    EXPECT_NO_THROW(SimConfig{}.validate());
}

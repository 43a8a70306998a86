#include <gtest/gtest.h>

#include <sstream>

#include <scma_ura/config.hpp>

using namespace scma_ura;

TEST(Config, ParsesAndOverrides)
{
    std::istringstream in(
        "# campaign\n"
        "codebook = f5x10\n"
        "\n"
        "sim.seed = 42\n"
        "sweep.step = 0.25\n"
        "decoder.policy = jmpa-only\n"
        "barring.enabled = true\n");
    ConfigMap m;
    m.parse(in);
    m.set_override("sim.seed=7");
    const auto c = to_sim_config(m);
    EXPECT_EQ(c.codebook, "f5x10");
    EXPECT_EQ(c.seed, 7u);
    EXPECT_DOUBLE_EQ(c.sweep.step, 0.25);
    EXPECT_EQ(c.policy, DecoderPolicy::JmpaOnly);
    EXPECT_TRUE(c.barring);
    EXPECT_EQ(c.slots_per_frame, 25);
}

TEST(Config, Lists)
{
    ConfigMap m;
    m.set("groups.list", "1, 2,4");
    EXPECT_EQ(m.get_list("groups.list", {}), (std::vector<double>{1, 2, 4}));
    EXPECT_EQ(m.get_list("oracle.rates", {1.0}), (std::vector<double>{1.0}));
}

TEST(Config, Rejections)
{
    ConfigMap m;
    EXPECT_THROW(m.set("sim.sed", "1"), Error);
    EXPECT_THROW(m.set_override("sim.seed"), Error);
    std::istringstream bad("sim.seed 4\n");
    EXPECT_THROW(m.parse(bad), Error);

    m.set("sim.seed", "4x");
    EXPECT_THROW(to_sim_config(m), Error);

    ConfigMap p;
    p.set("decoder.policy", "greedy");
    EXPECT_THROW(to_sim_config(p), Error);

    ConfigMap r;
    r.set("sim.replications", "1");
    EXPECT_THROW(to_sim_config(r), Error);

    ConfigMap b;
    b.set("barring.enabled", "maybe");
    EXPECT_THROW(to_sim_config(b), Error);

    EXPECT_THROW(ConfigMap{}.load("/nonexistent/scma.conf"), Error);
}

TEST(Config, Names)
{
    for (auto p : {DecoderPolicy::ComponentWise, DecoderPolicy::AllOrNothing, DecoderPolicy::JmpaOnly})
        EXPECT_EQ(parse_policy(to_string(p)), p);
    for (auto r : {ObservabilityRule::Direct, ObservabilityRule::PostDecode})
        EXPECT_EQ(parse_observability(to_string(r)), r);
    for (auto a : {ArrivalMode::Fixed, ArrivalMode::Sweep, ArrivalMode::Schedule})
        EXPECT_EQ(parse_arrival_mode(to_string(a)), a);
}

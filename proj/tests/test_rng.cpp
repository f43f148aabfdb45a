#include <cmath>
#include <cstdint>
#include <numbers>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include <coopnet/rng.hpp>
#include <coopnet/stats.hpp>

using namespace coopnet;

TEST(SplitMix64, ReferenceVectorsSeedZero)
{
    SplitMix64 g(0);
    EXPECT_EQ(g(), 0xE220A8397B1DCDAFULL);
    EXPECT_EQ(g(), 0x6E789E6AA1B965F4ULL);
    EXPECT_EQ(g(), 0x06C45D188009454FULL);
}

TEST(SplitMix64, MixMatchesFirstOutput)
{
    EXPECT_EQ(splitmix64_mix(kGoldenGamma), 0xE220A8397B1DCDAFULL);
}

TEST(DeriveSeed, MatchesDocumentedFormula)
{
    const std::uint64_t root = 42, stream = 3, index = 7;
    const std::uint64_t s = splitmix64_mix(root ^ splitmix64_mix(stream + kGoldenGamma));
    EXPECT_EQ(derive_seed(root, stream, index), splitmix64_mix(s + (index + 1) * kGoldenGamma));
}

TEST(DeriveSeed, DistinctAcrossStreamsAndIndices)
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t stream = 0; stream < 20; ++stream)
        for (std::uint64_t i = 0; i < 500; ++i)
            seen.insert(derive_seed(0, stream, i));
    EXPECT_EQ(seen.size(), 20u * 500u);
    EXPECT_NE(derive_seed(0, 0, 0), derive_seed(1, 0, 0));
}

TEST(Uniform, Ranges)
{
    SplitMix64 g(123);
    for (int i = 0; i < 100000; ++i)
    {
        const double u = uniform01(g);
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        const double v = uniform_open0(g);
        EXPECT_GT(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(Uniform, ExtremeWords)
{
    struct Fixed
    {
        using result_type = std::uint64_t;
        std::uint64_t v;
        static constexpr result_type min() { return 0; }
        static constexpr result_type max() { return ~0ULL; }
        result_type operator()() { return v; }
    };
    Fixed lo{0}, hi{~0ULL};
    EXPECT_EQ(uniform01(lo), 0.0);
    EXPECT_LT(uniform01(hi), 1.0);
    EXPECT_GT(uniform_open0(lo), 0.0);
    EXPECT_EQ(uniform_open0(hi), 1.0);
}

TEST(NearestDistance, FollowsRayleighLaw)
{
    const double lambda = 0.7;
    std::vector<double> s;
    for (std::uint64_t i = 0; i < 20000; ++i)
    {
        SplitMix64 g = trial_rng(5, 0, i);
        s.push_back(sample_nearest_distance(lambda, g));
    }
    const double ks = ks_statistic(s, [&](double t) { return 1.0 - std::exp(-std::numbers::pi * lambda * t * t); });
    EXPECT_LT(ks, 0.015);
}

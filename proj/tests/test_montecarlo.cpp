#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include <coopnet/montecarlo.hpp>
#include <coopnet/theory.hpp>

using namespace coopnet;

namespace {

// Campbell: E[sum over r < |Y| <= R of P G |Y|^-alpha], with
// E[P G] = E[L^alpha] E[1/W] E[G] and E[L^alpha] = Gamma(alpha/2 + 1) / (pi lambda)^(alpha/2).
double campbell_mean(const SimParams& p, double r, double outer)
{
    const double e_l = std::tgamma(0.5 * p.alpha + 1.0) / std::pow(std::numbers::pi * p.lambda, 0.5 * p.alpha);
    const double e_inv_w = p.delta1 == p.delta2 ? 1.0 / p.delta1
                                                : std::log(p.delta2 / p.delta1) / (p.delta2 - p.delta1);
    const double e_g = p.sidelobe_mode == SidelobeMode::constant ? p.delta : 0.75 * p.delta;
    const double radial = (std::pow(r, 2.0 - p.alpha) - std::pow(outer, 2.0 - p.alpha)) / (p.alpha - 2.0);
    return p.lambda * e_l * e_inv_w * e_g * 2.0 * std::numbers::pi * radial;
}

SimParams small_params()
{
    SimParams p;
    p.eta = 0.25;
    p.rings = 2;
    p.theta = 20.0;
    return p;
}

} // namespace

TEST(Outage, ThresholdRule)
{
    EXPECT_TRUE(is_outage(0.6, 2.0));
    EXPECT_FALSE(is_outage(0.5, 2.0));
    EXPECT_FALSE(is_outage(0.0, 1e9));
}

TEST(OutageCounts, CommutativeMonoid)
{
    const OutageCounts a{10, 8, 2}, b{5, 5, 1}, c{7, 3, 0};
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ(a + OutageCounts{}, a);

    OutageCounts t;
    t.add({0.0, false, 0.0, 0.0, false});
    t.add({2.0, true, 0.0, 0.0, true});
    t.add({0.1, false, 0.0, 0.0, true});
    EXPECT_EQ(t, (OutageCounts{3, 2, 1}));
}

TEST(Estimate, FromCounts)
{
    const OutageEstimate e = make_estimate({1000, 800, 8});
    EXPECT_DOUBLE_EQ(e.p_hat, 0.01);
    EXPECT_DOUBLE_EQ(e.acceptance_rate, 0.8);
    ASSERT_TRUE(e.psi_hat);
    EXPECT_DOUBLE_EQ(*e.psi_hat, -std::log(0.01));
    EXPECT_FALSE(make_estimate({10, 10, 0}).psi_hat);
    EXPECT_THROW(make_estimate({10, 0, 0}), EstimationError);
    EXPECT_THROW(estimate_outage(small_params(), MobileMode::center, 0), ParameterError);
}

TEST(Estimate, IdenticalForAnyThreadCount)
{
    const SimParams p = small_params();
    for (MobileMode mode : {MobileMode::center, MobileMode::typical})
    {
        const OutageEstimate one = estimate_outage(p, mode, 3000, 1);
        EXPECT_EQ(one, estimate_outage(p, mode, 3000, 2));
        EXPECT_EQ(one, estimate_outage(p, mode, 3000, 7));
        EXPECT_GT(one.n_outage, 0u);
    }
}

TEST(Trial, DeterministicPerIndex)
{
    const SimParams p = small_params();
    const TrialOutcome a = run_trial(p, MobileMode::typical, 42);
    const TrialOutcome b = run_trial(p, MobileMode::typical, 42);
    EXPECT_EQ(a.accepted, b.accepted);
    EXPECT_EQ(a.interference, b.interference);
    const TrialOutcome c = run_trial(p, MobileMode::typical, 42, 1);
    EXPECT_TRUE(c.interference != a.interference || c.accepted != a.accepted);
}

TEST(Trial, CenterModeDepthMargin)
{
    const SimParams p = small_params();
    for (std::uint64_t i = 0; i < 200; ++i)
    {
        const TrialOutcome t = run_trial(p, MobileMode::center, i);
        if (!t.accepted)
            continue;
        EXPECT_GE(t.depth_margin, 0.0);
        EXPECT_GT(t.link_distance, 0.0);
    }
}

TEST(Trial, RethresholdingIsMonotone)
{
    const SimParams p = small_params();
    const auto trials = collect_trials(p, MobileMode::center, 2000);
    std::uint64_t prev = 0;
    for (double theta : {1.0, 5.0, 20.0, 80.0, 320.0})
    {
        std::uint64_t k = 0;
        for (const auto& t : trials)
            k += t.accepted && is_outage(t.interference, theta);
        EXPECT_GE(k, prev);
        prev = k;
    }
}

TEST(ExactCellMode, RunsAndAgreesInDistributionRoughly)
{
    SimParams p = small_params();
    p.link_mode = LinkMode::exact_cell;
    const OutageEstimate e = estimate_outage(p, MobileMode::center, 400);
    EXPECT_GT(e.n_accepted, 0u);
}

TEST(LinkTail, MatchesOracle)
{
    SimParams p;
    p.delta1 = 1.0;
    p.delta2 = 2.0;
    p.delta = 0.5;
    p.sidelobe_mode = SidelobeMode::uniform;
    const std::vector<double> grid{0.01, 0.05, 0.2, 0.5};
    const TailCurve t = estimate_link_power_tail(p, grid, 200000);
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        const double want = lemma1_oracle(p, grid[i]);
        EXPECT_GE(want, t.ci_lo[i] - 0.002) << grid[i];
        EXPECT_LE(want, t.ci_hi[i] + 0.002) << grid[i];
    }
    EXPECT_THROW(estimate_link_power_tail(p, std::vector<double>{2.0, 1.0}, 10), ParameterError);
}

TEST(ShotNoise, CampbellMean)
{
    for (SidelobeMode mode : {SidelobeMode::constant, SidelobeMode::uniform})
    {
        SimParams p;
        p.delta2 = 1.5;
        p.sidelobe_mode = mode;
        const double r = 1.0, outer = 6.0;
        const double got = mean_shot_noise(p, r, outer, 40000);
        EXPECT_NEAR(got / campbell_mean(p, r, outer), 1.0, 0.05) << to_string(mode);
    }
}

TEST(ShotNoise, EmptyAnnulusIsZero)
{
    SimParams p;
    SplitMix64 g(1);
    EXPECT_EQ(sample_truncated_shot_noise(p, 2.0, 2.0, g), 0.0);
    EXPECT_THROW(sample_truncated_shot_noise(p, 0.0, 2.0, g), ParameterError);
}

TEST(Sweep, ClusterSizeSetsEta)
{
    const SimParams p = with_cluster_size(SimParams{}, 8.0);
    EXPECT_DOUBLE_EQ(p.eta, 1.0 / 8.0);
    EXPECT_DOUBLE_EQ(p.K(), 8.0);
    EXPECT_THROW(with_cluster_size(SimParams{}, 0.0), ParameterError);

    const std::vector<double> ks{4.0, 6.0};
    const auto pts = sweep_k(small_params(), ks, 500, MobileMode::center, 1);
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_EQ(pts[1].estimate, estimate_outage(pts[1].params, MobileMode::center, 500, 1, 1));
}

TEST(GeomSamplers, GuardRings)
{
    const double rho = HexLattice(0.1, 0).rho();
    const int r = guard_rings(0.1, 3.0);
    EXPECT_GE((std::sqrt(3.0) * r - 2.0 / std::sqrt(3.0)) * rho, 3.0);
    EXPECT_LT((std::sqrt(3.0) * (r - 1) - 2.0 / std::sqrt(3.0)) * rho, 3.0);
}

TEST(GeomSamplers, DistanceLaws)
{
    SimParams p;
    const auto l = sample_nearest_bs_distances(p, 5000);
    EXPECT_LT(ks_statistic(l, [&](double t) { return 1.0 - nearest_distance_ccdf(p.lambda, t); }), 0.03);
    const double rho = HexLattice(p.eta, 0).rho();
    const auto d = sample_depth_margins(p, 0.5, 5000);
    EXPECT_LT(ks_statistic(d, [&](double x) { return 1.0 - boundary_distance_ccdf(0.5, rho, x); }), 0.03);
}

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include <coopnet/geometry.hpp>
#include <coopnet/rng.hpp>
#include <coopnet/stats.hpp>

using namespace coopnet;

namespace {

// Point-in-hexagon by edge cross products; vertices at 30 + 60k degrees.
bool inside_hexagon(Point p, Point c, double apothem)
{
    const double cr = 2.0 * apothem / std::numbers::sqrt3;
    std::array<Point, 6> v;
    for (int k = 0; k < 6; ++k)
    {
        const double phi = std::numbers::pi / 6.0 + k * std::numbers::pi / 3.0;
        v[k] = {c.x + cr * std::cos(phi), c.y + cr * std::sin(phi)};
    }
    for (int k = 0; k < 6; ++k)
    {
        const Point a = v[k];
        const Point b = v[(k + 1) % 6];
        const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        if (cross < 0.0)
            return false;
    }
    return true;
}

std::size_t brute_nearest(Point p, std::span<const Point> pts)
{
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        const double d = std::hypot(p.x - pts[i].x, p.y - pts[i].y);
        if (d < best_d)
        {
            best_d = d;
            best = i;
        }
    }
    return best;
}

} // namespace

TEST(HexLattice, ApothemIdentity)
{
    SplitMix64 g(1);
    for (int i = 0; i < 100; ++i)
    {
        const double eta = std::exp(uniform(g, -6.0, 3.0));
        const HexLattice lat(eta, 1);
        EXPECT_NEAR(2.0 * std::numbers::sqrt3 * lat.rho() * lat.rho() * eta, 1.0, 1e-12);
        EXPECT_NEAR(distance(lat.centers()[0], lat.centers()[1]) / (2.0 * lat.rho()), 1.0, 1e-12);
    }
}

TEST(HexLattice, RingCountsAndOrder)
{
    for (int rings = 0; rings <= 5; ++rings)
    {
        const HexLattice lat(0.1, rings);
        EXPECT_EQ(lat.size(), static_cast<std::size_t>(3 * rings * rings + 3 * rings + 1));
        EXPECT_EQ(lat.centers()[0].x, 0.0);
        EXPECT_EQ(lat.centers()[0].y, 0.0);
        std::size_t idx = 1;
        for (int k = 1; k <= rings; ++k)
            for (int j = 0; j < 6 * k; ++j, ++idx)
                EXPECT_EQ(hex_distance(lat.axial()[idx]), k);
    }
}

TEST(HexLattice, NeighborsAtSixtyDegrees)
{
    const HexLattice lat(0.3, 1);
    for (std::size_t i = 1; i < 7; ++i)
    {
        const Point c = lat.centers()[i];
        EXPECT_NEAR(norm(c), 2.0 * lat.rho(), 1e-12);
        const double deg = std::atan2(c.y, c.x) * 180.0 / std::numbers::pi;
        const double rem = std::fmod(deg + 360.0, 60.0);
        EXPECT_TRUE(rem < 1e-9 || 60.0 - rem < 1e-9);
    }
}

TEST(HexLattice, RejectsBadInput)
{
    EXPECT_THROW(HexLattice(0.0, 1), ParameterError);
    EXPECT_THROW(HexLattice(0.1, -1), ParameterError);
}

TEST(NearestCenter, MatchesBruteForce)
{
    const HexLattice lat(0.2, 3);
    SplitMix64 g(2);
    const double span = 8.0 * lat.rho() * 1.3;
    for (int i = 0; i < 20000; ++i)
    {
        const Point p{uniform(g, -span, span), uniform(g, -span, span)};
        const std::size_t got = nearest_center(p, lat);
        const std::size_t want = brute_nearest(p, lat.centers());
        EXPECT_NEAR(distance(p, lat.centers()[got]), distance(p, lat.centers()[want]), 1e-12);
    }
}

TEST(HexDepth, MembershipMatchesHalfPlanes)
{
    const HexLattice lat(0.1, 1);
    SplitMix64 g(3);
    const Point c{0.4, -0.2};
    const double a = 0.8 * lat.rho();
    int disagreements = 0;
    for (int i = 0; i < 50000; ++i)
    {
        const Point p{uniform(g, -2.0 * a, 2.0 * a), uniform(g, -2.0 * a, 2.0 * a)};
        const bool by_depth = hex_depth(p, c, lat) <= a;
        disagreements += by_depth != inside_hexagon(p, c, a);
    }
    EXPECT_EQ(disagreements, 0);
}

TEST(HexDepth, EdgeMidpointAndVertex)
{
    const HexLattice lat(0.1, 0);
    const double a = lat.rho();
    EXPECT_NEAR(hex_depth({a, 0.0}, {0.0, 0.0}, lat), a, 1e-12);
    const double cr = lat.circumradius();
    EXPECT_NEAR(hex_depth({cr * std::cos(std::numbers::pi / 6), cr * std::sin(std::numbers::pi / 6)},
                          {0.0, 0.0}, lat),
                a, 1e-12);
    EXPECT_EQ(hex_depth({0.0, 0.0}, {0.0, 0.0}, lat), 0.0);
}

TEST(StudyRegion, ContainsMatchesMemberOfNearestCenter)
{
    const HexLattice lat(0.2, 2);
    const StudyRegion region(lat, {0, 1, 4, 9});
    EXPECT_NEAR(region.area(), 4.0 / 0.2, 1e-12);
    SplitMix64 g(4);
    for (int i = 0; i < 20000; ++i)
    {
        const Point p{uniform(g, -12.0, 12.0), uniform(g, -12.0, 12.0)};
        const std::size_t want = brute_nearest(p, lat.centers());
        const bool in_window = hex_depth(p, lat.centers()[want], lat) <= lat.rho() + 1e-12;
        const bool expected = in_window && region.is_member(want);
        EXPECT_EQ(region.contains(p), expected);
    }
}

TEST(SamplePpp, CountAndSupport)
{
    const HexLattice lat(0.25, 2);
    const StudyRegion region(lat);
    const double lambda = 1.5;
    double total = 0.0;
    const int reps = 2000;
    for (int i = 0; i < reps; ++i)
    {
        SplitMix64 g = trial_rng(9, 0, i);
        const auto pts = sample_ppp(lambda, region, g);
        for (const Point& p : pts)
            ASSERT_TRUE(region.contains(p));
        total += static_cast<double>(pts.size());
    }
    const double mean = lambda * region.area();
    // Poisson: sd of the average is sqrt(mean / reps).
    EXPECT_NEAR(total / reps, mean, 4.0 * std::sqrt(mean / reps));
}

TEST(SamplePppClustered, SameLawAsBoundingBoxSampler)
{
    const HexLattice lat(0.25, 2);
    const StudyRegion region(lat);
    const double lambda = 1.5;
    double total = 0.0;
    double inner = 0.0;
    const int reps = 2000;
    for (int i = 0; i < reps; ++i)
    {
        SplitMix64 g = trial_rng(10, 0, i);
        for (const ClusteredPoint& p : sample_ppp_clustered(lambda, region, g))
        {
            ASSERT_EQ(nearest_center(p.position, lat), p.cluster);
            total += 1.0;
            inner += hex_depth(p.position, lat.centers()[p.cluster], lat) <= 0.5 * lat.rho();
        }
    }
    const double mean = lambda * region.area();
    EXPECT_NEAR(total / reps, mean, 4.0 * std::sqrt(mean / reps));
    // Uniform in each hexagon: the half-apothem hexagon holds a quarter of the mass.
    EXPECT_NEAR(inner / total, 0.25, 0.01);
}

TEST(SampleUniformHexagon, BoundaryDistanceLaw)
{
    const HexLattice lat(0.1, 0);
    const double a = 0.5 * lat.rho();
    std::vector<double> d;
    for (std::uint64_t i = 0; i < 20000; ++i)
    {
        SplitMix64 g = trial_rng(11, 0, i);
        const Point p = sample_uniform_hexagon({0.0, 0.0}, a, lat, g);
        ASSERT_TRUE(inside_hexagon(p, {0.0, 0.0}, a + 1e-12));
        d.push_back(a - hex_depth(p, {0.0, 0.0}, lat));
    }
    const double ks = ks_statistic(d, [&](double x) {
        const double s = 1.0 - x / a;
        return 1.0 - s * s;
    });
    EXPECT_LT(ks, 0.015);
}

TEST(SampleUniformHexagon, AcceptanceRateIsAreaRatio)
{
    const HexLattice lat(0.1, 0);
    std::uint64_t proposals = 0;
    const int n = 50000;
    SplitMix64 g(12);
    for (int i = 0; i < n; ++i)
        proposals += sample_uniform_hexagon_counted({0.0, 0.0}, 1.0, lat, g).proposals;
    // Hexagon / circumscribed disk = 3 sqrt(3) / (2 pi).
    EXPECT_NEAR(n / static_cast<double>(proposals), 3.0 * std::numbers::sqrt3 / (2.0 * std::numbers::pi),
                0.01);
}

TEST(NearestBs, MatchesBruteForceAndRejectsEmpty)
{
    SplitMix64 g(13);
    std::vector<Point> pts;
    for (int i = 0; i < 200; ++i)
        pts.push_back({uniform(g, -5.0, 5.0), uniform(g, -5.0, 5.0)});
    for (int i = 0; i < 1000; ++i)
    {
        const Point u{uniform(g, -6.0, 6.0), uniform(g, -6.0, 6.0)};
        const NearestBs nb = nearest_bs(u, pts);
        EXPECT_EQ(nb.index, brute_nearest(u, pts));
        EXPECT_NEAR(nb.distance, distance(u, pts[nb.index]), 1e-12);
    }
    EXPECT_THROW(nearest_bs(Point{}, std::vector<Point>{}), DegenerateRealization);
}

TEST(NearestBs, TiesGoToLowestIndex)
{
    const std::vector<Point> pts{{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}};
    EXPECT_EQ(nearest_bs(Point{0.0, 0.0}, pts).index, 0u);
}

#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/distributions/beta.hpp>
#include <gtest/gtest.h>

#include <coopnet/stats.hpp>

using namespace coopnet;

namespace {

// Exact (Clopper-Pearson) 95% interval from beta quantiles.
Interval clopper_pearson(std::uint64_t k, std::uint64_t n)
{
    const double a = 0.025;
    Interval ci;
    ci.lo = k == 0 ? 0.0 : boost::math::quantile(boost::math::beta_distribution<>(k, n - k + 1.0), a);
    ci.hi = k == n ? 1.0 : boost::math::quantile(boost::math::beta_distribution<>(k + 1.0, n - k), 1.0 - a);
    return ci;
}

} // namespace

TEST(Wilson, ZeroSuccesses)
{
    const Interval w = wilson_interval(0, 100);
    EXPECT_EQ(w.lo, 0.0);
    EXPECT_NEAR(w.hi, 0.0370, 5e-5);
    // Clopper-Pearson is 1 - 0.025^(1/100) here; Wilson is close and no wider.
    const Interval cp = clopper_pearson(0, 100);
    EXPECT_NEAR(cp.hi, 1.0 - std::pow(0.025, 0.01), 1e-12);
    EXPECT_NEAR(w.hi, cp.hi, 0.002);
}

TEST(Wilson, CloseToExactIntervalAcrossCounts)
{
    for (std::uint64_t n : {50ULL, 400ULL, 10000ULL})
    {
        for (std::uint64_t k = 0; k <= n; k += n / 25)
        {
            const Interval w = wilson_interval(k, n);
            const Interval cp = clopper_pearson(k, n);
            const double p = static_cast<double>(k) / n;
            EXPECT_LE(w.lo, p);
            EXPECT_GE(w.hi, p);
            EXPECT_GE(w.lo, 0.0);
            EXPECT_LE(w.hi, 1.0);
            const double tol = 0.15 / std::sqrt(static_cast<double>(n)) + 0.002;
            EXPECT_NEAR(w.lo, cp.lo, tol) << k << "/" << n;
            EXPECT_NEAR(w.hi, cp.hi, tol) << k << "/" << n;
        }
    }
}

TEST(Wilson, AllSuccesses)
{
    const Interval w = wilson_interval(100, 100);
    EXPECT_EQ(w.hi, 1.0);
    EXPECT_NEAR(w.lo, 1.0 - 0.0370, 5e-5);
}

TEST(Ks, GridSamplesOfUniform)
{
    const int n = 1000;
    std::vector<double> s;
    for (int i = 0; i < n; ++i)
        s.push_back((i + 0.5) / n);
    EXPECT_NEAR(ks_statistic(s, [](double x) { return x; }), 0.5 / n, 1e-15);
}

TEST(Ks, ShiftedSample)
{
    std::vector<double> s;
    for (int i = 0; i < 1000; ++i)
        s.push_back(0.2 + 0.8 * (i + 0.5) / 1000);
    // All mass above 0.2: sup |F_n - F| is at least 0.2.
    EXPECT_GE(ks_statistic(s, [](double x) { return x; }), 0.2);
}

TEST(Tail, ExceedanceCounts)
{
    const std::vector<double> grid{1.0, 2.0, 3.0};
    std::vector<std::uint64_t> c(3, 0);
    for (double v : {0.5, 1.0, 1.5, 2.5, 3.5, 10.0})
        count_exceedances(v, grid, c);
    EXPECT_EQ(c, (std::vector<std::uint64_t>{4, 3, 2}));
    const TailCurve t = make_tail_curve(grid, c, 6);
    EXPECT_DOUBLE_EQ(t.ccdf[0], 4.0 / 6.0);
    EXPECT_EQ(t.n, 6u);
    for (std::size_t i = 0; i < 3; ++i)
    {
        EXPECT_LE(t.ci_lo[i], t.ccdf[i]);
        EXPECT_GE(t.ci_hi[i], t.ccdf[i]);
    }
}

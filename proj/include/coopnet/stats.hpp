#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace coopnet {

/// Two-sided 95% standard normal quantile.
inline constexpr double kZ95 = 1.959963984540054;

struct Interval
{
    double lo = 0.0;
    double hi = 1.0;
};

/// Wilson score interval for k successes out of n (n > 0).
inline Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z = kZ95)
{
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::clamp(std::min(center - half, p), 0.0, 1.0),
            std::clamp(std::max(center + half, p), 0.0, 1.0)};
}

/*!
 * One-sample Kolmogorov-Smirnov statistic sup |F_n - F| of `samples`
 * against the continuous CDF `cdf`. Sorts a copy of the samples.
 */
template <class Cdf>
double ks_statistic(std::span<const double> samples, Cdf cdf)
{
    std::vector<double> s(samples.begin(), samples.end());
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
    {
        const double f = std::invoke(cdf, s[i]);
        d = std::max(d, std::max(static_cast<double>(i + 1) / n - f,
                                 f - static_cast<double>(i) / n));
    }
    return d;
}

/// Empirical CCDF with Wilson bands on a threshold grid.
struct TailCurve
{
    std::vector<double> thresholds;
    std::vector<double> ccdf;
    std::vector<double> ci_lo;
    std::vector<double> ci_hi;
    std::vector<std::uint64_t> exceed;
    std::uint64_t n = 0;
};

/// Counts of samples strictly above each grid value (grid increasing).
inline void count_exceedances(double value, std::span<const double> grid,
                              std::span<std::uint64_t> counts) noexcept
{
    // Grid is increasing, so the exceeded thresholds form a prefix.
    const auto end = std::lower_bound(grid.begin(), grid.end(), value);
    for (auto it = grid.begin(); it != end; ++it)
        ++counts[static_cast<std::size_t>(it - grid.begin())];
}

inline TailCurve make_tail_curve(std::span<const double> grid,
                                 std::span<const std::uint64_t> counts, std::uint64_t n)
{
    TailCurve t;
    t.thresholds.assign(grid.begin(), grid.end());
    t.exceed.assign(counts.begin(), counts.end());
    t.n = n;
    for (std::uint64_t c : counts)
    {
        const Interval ci = wilson_interval(c, n);
        t.ccdf.push_back(static_cast<double>(c) / static_cast<double>(n));
        t.ci_lo.push_back(ci.lo);
        t.ci_hi.push_back(ci.hi);
    }
    return t;
}

} // namespace coopnet

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"
#include "netmodel.hpp"
#include "params.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace coopnet {

// Stream tags for seed derivation; outage sweeps use the K index as stream.
inline constexpr std::uint64_t kLinkTailStream = 0x4c494e4b00000000ULL;
inline constexpr std::uint64_t kShotNoiseStream = 0x53484f5400000000ULL;
inline constexpr std::uint64_t kGeomStream = 0x47454f4d00000000ULL;

struct TrialOutcome
{
    double interference = 0.0;
    bool outage = false;
    /// Serving link distance |U* - Y*|.
    double link_distance = std::numeric_limits<double>::quiet_NaN();
    /// Serving BS depth margin sqrt(nu) rho - hex_depth.
    double depth_margin = std::numeric_limits<double>::quiet_NaN();
    bool accepted = false;
};

/// Outage iff I theta > 1, i.e. I > 1 / theta.
constexpr bool is_outage(double interference, double theta) noexcept
{
    return interference * theta > 1.0;
}

/// Order-insensitive trial counters; aggregation is a commutative sum.
struct OutageCounts
{
    std::uint64_t n_trials = 0;
    std::uint64_t n_accepted = 0;
    std::uint64_t n_outage = 0;

    void add(const TrialOutcome& t) noexcept
    {
        ++n_trials;
        if (t.accepted)
        {
            ++n_accepted;
            n_outage += t.outage ? 1 : 0;
        }
    }

    OutageCounts& operator+=(const OutageCounts& o) noexcept
    {
        n_trials += o.n_trials;
        n_accepted += o.n_accepted;
        n_outage += o.n_outage;
        return *this;
    }

    friend OutageCounts operator+(OutageCounts a, const OutageCounts& b) noexcept { return a += b; }
    friend bool operator==(const OutageCounts&, const OutageCounts&) = default;
};

struct OutageEstimate
{
    std::uint64_t n_trials = 0;
    std::uint64_t n_accepted = 0;
    std::uint64_t n_outage = 0;
    double p_hat = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 1.0;
    /// -log p_hat; empty when no outage was observed.
    std::optional<double> psi_hat;
    double acceptance_rate = 0.0;

    friend bool operator==(const OutageEstimate&, const OutageEstimate&) = default;
};

inline OutageEstimate make_estimate(const OutageCounts& c)
{
    if (c.n_accepted == 0)
        throw EstimationError("no accepted trials to estimate from");
    OutageEstimate e;
    e.n_trials = c.n_trials;
    e.n_accepted = c.n_accepted;
    e.n_outage = c.n_outage;
    e.p_hat = static_cast<double>(c.n_outage) / static_cast<double>(c.n_accepted);
    const Interval ci = wilson_interval(c.n_outage, c.n_accepted);
    e.ci_lo = ci.lo;
    e.ci_hi = ci.hi;
    if (c.n_outage > 0)
        e.psi_hat = -std::log(e.p_hat);
    e.acceptance_rate = static_cast<double>(c.n_accepted) / static_cast<double>(c.n_trials);
    return e;
}

inline unsigned resolve_threads(unsigned hint) noexcept
{
    if (hint != 0)
        return hint;
    return std::max(1u, std::thread::hardware_concurrency());
}

/*!
 * Split [0, n) into contiguous chunks, run `body(begin, end)` on up to
 * `threads` workers and return the per-chunk results in chunk order.
 */
template <class Result, class Body>
std::vector<Result> parallel_chunks(std::uint64_t n, unsigned threads, Body body)
{
    const std::uint64_t workers = std::min<std::uint64_t>(resolve_threads(threads), std::max<std::uint64_t>(n, 1));
    std::vector<Result> results(workers);
    auto run = [&](std::uint64_t w) {
        const std::uint64_t begin = n * w / workers;
        const std::uint64_t end = n * (w + 1) / workers;
        results[w] = body(begin, end);
    };
    if (workers == 1)
    {
        run(0);
        return results;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w)
        pool.emplace_back(run, w);
    pool.clear();
    return results;
}

/// Aggregate n trials produced by `trial(index)` into counts.
template <class TrialFn>
OutageCounts run_counts(TrialFn trial, std::uint64_t n, unsigned threads = 0,
                        std::uint64_t first_index = 0)
{
    auto parts = parallel_chunks<OutageCounts>(n, threads, [&](std::uint64_t b, std::uint64_t e) {
        OutageCounts c;
        for (std::uint64_t i = b; i < e; ++i)
            c.add(trial(first_index + i));
        return c;
    });
    OutageCounts total;
    for (const auto& p : parts)
        total += p;
    return total;
}

/// Outage estimate from an arbitrary trial stream.
template <class TrialFn>
OutageEstimate estimate_outage_with(TrialFn trial, std::uint64_t n, unsigned threads = 0)
{
    if (n < 1)
        throw ParameterError("n_trials", "need at least one trial");
    return make_estimate(run_counts(trial, n, threads));
}

/*!
 * Runs single trials for fixed parameters. The window is built once and
 * shared; each trial draws from its own generator seeded by
 * (params.seed, stream, trial_index).
 */
class TrialRunner
{
  public:
    TrialRunner(const SimParams& params, MobileMode mode, std::uint64_t stream = 0)
        : params_(params), mode_(mode), stream_(stream)
    {
        validate(params_);
        window_ = make_window(params_);
    }

    const SimParams& params() const noexcept { return params_; }
    const StudyRegion& window() const noexcept { return *window_; }

    TrialOutcome operator()(std::uint64_t trial_index) const
    {
        SplitMix64 rng = trial_rng(params_.seed, stream_, trial_index);
        TrialOutcome out;
        try
        {
            const Topology topo = build_topology(params_, window_, mode_, rng);
            if (!topo.accepted)
                return out;
            const auto interferers = co_channel_interferers(topo, rng);
            out.interference = interference_power(topo, interferers);
            out.outage = is_outage(out.interference, params_.theta);
            const BsRecord& serving = topo.bss[topo.serving_bs];
            out.link_distance = serving.link->distance;
            out.depth_margin = interior_apothem(topo.lattice(), params_.nu) -
                               hex_depth(serving.position, topo.lattice().centers()[0], topo.lattice());
            out.accepted = true;
        }
        catch (const RealizationRejected&)
        {
            out = TrialOutcome{};
        }
        return out;
    }

  private:
    SimParams params_;
    MobileMode mode_;
    std::uint64_t stream_;
    std::shared_ptr<const StudyRegion> window_;
};

/// Single trial; a deterministic function of (params.seed, stream, trial_index).
inline TrialOutcome run_trial(const SimParams& params, MobileMode mode, std::uint64_t trial_index,
                              std::uint64_t stream = 0)
{
    return TrialRunner(params, mode, stream)(trial_index);
}

inline OutageCounts outage_counts(const SimParams& params, MobileMode mode, std::uint64_t n_trials,
                                  unsigned threads = 0, std::uint64_t stream = 0,
                                  std::uint64_t first_index = 0)
{
    const TrialRunner runner(params, mode, stream);
    return run_counts(runner, n_trials, threads, first_index);
}

inline OutageEstimate estimate_outage(const SimParams& params, MobileMode mode, std::uint64_t n_trials,
                                      unsigned threads = 0, std::uint64_t stream = 0)
{
    if (n_trials < 1)
        throw ParameterError("n_trials", "need at least one trial");
    return make_estimate(outage_counts(params, mode, n_trials, threads, stream));
}

/// All trial outcomes, indexed by trial, for re-thresholding studies.
inline std::vector<TrialOutcome> collect_trials(const SimParams& params, MobileMode mode,
                                                std::uint64_t n_trials, unsigned threads = 0,
                                                std::uint64_t stream = 0)
{
    const TrialRunner runner(params, mode, stream);
    std::vector<TrialOutcome> out(n_trials);
    parallel_chunks<int>(n_trials, threads, [&](std::uint64_t b, std::uint64_t e) {
        for (std::uint64_t i = b; i < e; ++i)
            out[i] = runner(i);
        return 0;
    });
    return out;
}

/// One draw of P G = (L^alpha / W) G for an interferer toward an unintended mobile.
template <class Rng>
double sample_link_power(const SimParams& p, Rng& rng)
{
    const double l = sample_nearest_distance(p.lambda, rng);
    const double w = draw_mainlobe_gain(p, rng);
    const double g = sidelobe_gain(p, rng);
    return tx_power(l, p.alpha, w) * g;
}

/// Empirical CCDF of P G on an increasing grid, n independent draws.
inline TailCurve estimate_link_power_tail(const SimParams& p, std::span<const double> x_grid,
                                          std::uint64_t n, unsigned threads = 0)
{
    validate(p);
    if (!std::is_sorted(x_grid.begin(), x_grid.end()))
        throw ParameterError("x_grid", "thresholds must be increasing");
    using Counts = std::vector<std::uint64_t>;
    auto parts = parallel_chunks<Counts>(n, threads, [&](std::uint64_t b, std::uint64_t e) {
        Counts c(x_grid.size(), 0);
        for (std::uint64_t i = b; i < e; ++i)
        {
            SplitMix64 rng = trial_rng(p.seed, kLinkTailStream, i);
            count_exceedances(sample_link_power(p, rng), x_grid, c);
        }
        return c;
    });
    Counts total(x_grid.size(), 0);
    for (const auto& c : parts)
        for (std::size_t k = 0; k < c.size(); ++k)
            total[k] += c[k];
    return make_tail_curve(x_grid, total, n);
}

/*!
 * Truncated shot noise at the origin: sum of P_Y G |Y|^-alpha over a PPP of
 * density lambda in the annulus r < |Y| <= outer_radius. Marks are i.i.d.
 * link powers (Rayleigh L, drawn W and G).
 */
template <class Rng>
double sample_truncated_shot_noise(const SimParams& p, double r, double outer_radius, Rng& rng)
{
    if (!(r > 0.0))
        throw ParameterError("r", "truncation radius must be positive");
    if (!(outer_radius > r))
        return 0.0;
    const double r2 = r * r;
    const double span2 = outer_radius * outer_radius - r2;
    std::poisson_distribution<std::int64_t> count_dist(p.lambda * std::numbers::pi * span2);
    const std::int64_t n = count_dist(rng);

    // (L / |Y|)^alpha from squared distances with one pow per point.
    const double half_alpha = 0.5 * p.alpha;
    const bool quartic = p.alpha == 4.0;
    const double inv_pi_lambda = 1.0 / (std::numbers::pi * p.lambda);
    double total = 0.0;
    for (std::int64_t i = 0; i < n; ++i)
    {
        const double d2 = r2 + span2 * uniform01(rng);
        const double l2 = -std::log(uniform_open0(rng)) * inv_pi_lambda;
        const double w = draw_mainlobe_gain(p, rng);
        const double g = sidelobe_gain(p, rng);
        const double ratio = l2 / d2;
        const double path = quartic ? ratio * ratio : std::pow(ratio, half_alpha);
        total += path * g / w;
    }
    return total;
}

inline TailCurve estimate_shot_noise_tail(const SimParams& p, double r, double outer_radius,
                                          std::span<const double> x_grid, std::uint64_t n,
                                          unsigned threads = 0)
{
    validate(p);
    if (!std::is_sorted(x_grid.begin(), x_grid.end()))
        throw ParameterError("x_grid", "thresholds must be increasing");
    using Counts = std::vector<std::uint64_t>;
    auto parts = parallel_chunks<Counts>(n, threads, [&](std::uint64_t b, std::uint64_t e) {
        Counts c(x_grid.size(), 0);
        for (std::uint64_t i = b; i < e; ++i)
        {
            SplitMix64 rng = trial_rng(p.seed, kShotNoiseStream, i);
            count_exceedances(sample_truncated_shot_noise(p, r, outer_radius, rng), x_grid, c);
        }
        return c;
    });
    Counts total(x_grid.size(), 0);
    for (const auto& c : parts)
        for (std::size_t k = 0; k < c.size(); ++k)
            total[k] += c[k];
    return make_tail_curve(x_grid, total, n);
}

/// Sample mean of n truncated shot-noise draws.
inline double mean_shot_noise(const SimParams& p, double r, double outer_radius, std::uint64_t n,
                              unsigned threads = 0)
{
    validate(p);
    auto parts = parallel_chunks<double>(n, threads, [&](std::uint64_t b, std::uint64_t e) {
        double s = 0.0;
        for (std::uint64_t i = b; i < e; ++i)
        {
            SplitMix64 rng = trial_rng(p.seed, kShotNoiseStream, i);
            s += sample_truncated_shot_noise(p, r, outer_radius, rng);
        }
        return s;
    });
    double total = 0.0;
    for (double s : parts)
        total += s;
    return total / static_cast<double>(n);
}

/*!
 * Smallest ring count whose window keeps every point of the central cluster
 * at least `reach` from the window edge. The window contains the hull of
 * its centers, whose inradius is sqrt(3) rings rho, and the central cluster
 * lies within 2 rho / sqrt 3 of the origin.
 */
inline int guard_rings(double eta, double reach)
{
    const double rho = HexLattice(eta, 0).rho();
    int rings = 1;
    while ((kSqrt3 * rings - 2.0 / kSqrt3) * rho < reach)
        ++rings;
    return rings;
}

/*!
 * Nearest-BS distances seen from a mobile uniform in the central cluster,
 * with BSs drawn by the bounding-box PPP sampler. The window is guarded so
 * that the nearest BS lies inside it except with probability e^-25.
 */
inline std::vector<double> sample_nearest_bs_distances(const SimParams& p, std::uint64_t n,
                                                       unsigned threads = 0)
{
    validate(p);
    const int rings = std::max(p.rings, guard_rings(p.eta, 5.0 / std::sqrt(std::numbers::pi * p.lambda)));
    const StudyRegion window{HexLattice(p.eta, rings)};
    const HexLattice& lattice = window.lattice();
    std::vector<double> out(n);
    parallel_chunks<int>(n, threads, [&](std::uint64_t b, std::uint64_t e) {
        for (std::uint64_t i = b; i < e; ++i)
        {
            SplitMix64 rng = trial_rng(p.seed, kGeomStream, i);
            const Point u = sample_uniform_hexagon(lattice.centers()[0], lattice.rho(), lattice, rng);
            const std::vector<Point> bss = sample_ppp(p.lambda, window, rng);
            out[i] = bss.empty() ? std::numeric_limits<double>::infinity() : nearest_bs(u, bss).distance;
        }
        return 0;
    });
    return out;
}

/// Depth margins sqrt(nu) rho - hex_depth of points uniform in the central
/// interior hexagon.
inline std::vector<double> sample_depth_margins(const SimParams& p, double nu, std::uint64_t n,
                                                unsigned threads = 0)
{
    if (!(nu > 0.0 && nu <= 1.0))
        throw ParameterError("nu", "interior fraction must lie in (0, 1]");
    const HexLattice lattice(p.eta, 0);
    const double a = interior_apothem(lattice, nu);
    const Point origin = lattice.centers()[0];
    const std::uint64_t stream = kGeomStream + 1 + static_cast<std::uint64_t>(nu * 1e6);
    std::vector<double> out(n);
    parallel_chunks<int>(n, threads, [&](std::uint64_t b, std::uint64_t e) {
        for (std::uint64_t i = b; i < e; ++i)
        {
            SplitMix64 rng = trial_rng(p.seed, stream, i);
            out[i] = a - hex_depth(sample_uniform_hexagon(origin, a, lattice, rng), origin, lattice);
        }
        return 0;
    });
    return out;
}

struct SweepPoint
{
    double K = 0.0;
    SimParams params;
    OutageEstimate estimate;
};

/// Parameters for cluster size K at fixed lambda (eta = lambda / K).
inline SimParams with_cluster_size(SimParams p, double k)
{
    if (!(k > 0.0) || !std::isfinite(k))
        throw ParameterError("k_values", "cluster size K must be positive");
    p.eta = p.lambda / k;
    return p;
}

/*!
 * Outage estimates over cluster sizes. Point i uses stream i, so each trial
 * is seeded by (seed, K index, trial index).
 */
inline std::vector<SweepPoint> sweep_k(const SimParams& params, std::span<const double> k_values,
                                       std::uint64_t n_per_point, MobileMode mode,
                                       unsigned threads = 0)
{
    std::vector<SweepPoint> out;
    out.reserve(k_values.size());
    for (std::size_t i = 0; i < k_values.size(); ++i)
    {
        const SimParams p = with_cluster_size(params, k_values[i]);
        out.push_back({k_values[i], p, estimate_outage(p, mode, n_per_point, threads, i)});
    }
    return out;
}

} // namespace coopnet

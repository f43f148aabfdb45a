#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "montecarlo.hpp"
#include "report.hpp"
#include "stats.hpp"
#include "theory.hpp"

namespace coopnet {

/*
 * Column sets per command:
 *   theory      K, eta, psi_center, psi_typical_lo, psi_typical_lo_tight, psi_typical_hi, regime
 *   outage      K, n, n_outage, p_hat, ci_lo, ci_hi, psi_hat, psi_theory_center,
 *               psi_theory_lo, psi_theory_hi, acceptance_rate
 *   sweep       same as outage, one row per K; the fit goes in the metadata
 *   tail        x, n, exceed, ccdf, ci_lo, ci_hi, psi_hat, then
 *               oracle_ccdf, exponent_asymptotic (link_power) or
 *               band_lo, band_hi (shot_noise)
 *   geomcheck   law, nu, n, ks_statistic
 *   convergence rings, n, n_outage, p_hat, ci_lo, ci_hi, acceptance_rate
 *
 * n is the number of accepted trials, the denominator of p_hat.
 */

/// True when the Wilson intervals of two estimates overlap.
inline bool intervals_overlap(const OutageEstimate& a, const OutageEstimate& b) noexcept
{
    return a.ci_lo <= b.ci_hi && b.ci_lo <= a.ci_hi;
}

namespace detail {

using json = nlohmann::json;

inline json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Run `fn`, tagging engine failures with the stage name. Parameter errors
// pass through untouched so they still count as validation failures.
template <class Fn>
auto in_stage(const char* stage, Fn&& fn)
{
    try
    {
        return fn();
    }
    catch (const ParameterError&)
    {
        throw;
    }
    catch (const IoError&)
    {
        throw;
    }
    catch (const StageError&)
    {
        throw;
    }
    catch (const std::exception& e)
    {
        throw StageError(stage, e.what());
    }
}

inline std::vector<json> estimate_row(double k, const SimParams& p, const OutageEstimate& e)
{
    const TypicalBounds tb = exponent_typical_bounds(p, k);
    const bool exp_regime = tb.regime == ExponentRegime::exponential;
    return {k,
            e.n_accepted,
            e.n_outage,
            e.p_hat,
            e.ci_lo,
            e.ci_hi,
            opt(e.psi_hat),
            exponent_center(p, k),
            exp_regime ? json(tb.lo) : json(nullptr),
            exp_regime ? json(tb.hi) : json(nullptr),
            e.acceptance_rate};
}

inline std::vector<std::string> estimate_columns()
{
    return {"K",           "n",           "n_outage",          "p_hat",
            "ci_lo",       "ci_hi",       "psi_hat",           "psi_theory_center",
            "psi_theory_lo", "psi_theory_hi", "acceptance_rate"};
}

inline void run_theory(const RunConfig& cfg, Report& r)
{
    r.columns = {"K", "eta", "psi_center", "psi_typical_lo", "psi_typical_lo_tight", "psi_typical_hi", "regime"};
    const SimParams& p = cfg.params;
    r.metadata["center_constant"] = center_exponent_constant(p);
    for (double k : cfg.k_values)
    {
        const TypicalBounds tb = exponent_typical_bounds(p, k);
        const bool exp_regime = tb.regime == ExponentRegime::exponential;
        r.rows.push_back({k, p.lambda / k, exponent_center(p, k),
                          exp_regime ? json(tb.lo) : json(nullptr),
                          exp_regime ? json(tb.lo_tight) : json(nullptr),
                          exp_regime ? json(tb.hi) : json(nullptr),
                          exp_regime ? "exponential" : "non_exponential"});
    }
}

inline void run_outage(const RunConfig& cfg, Report& r)
{
    r.columns = estimate_columns();
    const SimParams& p = cfg.params;
    const OutageEstimate e =
        in_stage("simulate", [&] { return estimate_outage(p, cfg.mode, cfg.n_trials, cfg.threads); });
    r.rows.push_back(estimate_row(p.K(), p, e));
}

/// Fit summary for a sweep, or the reason it could not be fitted.
inline json sweep_fit(const std::vector<SweepPoint>& points, const SimParams& p, MobileMode mode)
{
    std::vector<FitPoint> fp;
    for (const auto& s : points)
    {
        if (s.estimate.p_hat > 0.0 && s.estimate.p_hat < 1.0)
            fp.push_back({s.K, s.estimate.p_hat});
    }
    if (fp.size() < 3)
        return json{{"status", "insufficient points with 0 < p_hat < 1"}};

    const double per_k_center = center_exponent_constant(p);
    const TypicalBounds tb = exponent_typical_bounds(p, 1.0);
    const ExponentFit fit = fit_exponent(fp, mode == MobileMode::center ? std::optional(per_k_center)
                                                                          : std::nullopt);
    json j{{"status", "ok"},
           {"points", fp.size()},
           {"slope", fit.slope},
           {"intercept", fit.intercept},
           {"r_squared", fit.r_squared},
           {"theory_center_per_k", per_k_center}};
    if (mode == MobileMode::center)
        j["ratio_to_theory"] = *fit.ratio_to_theory;
    if (tb.regime == ExponentRegime::exponential)
    {
        j["theory_typical_lo_per_k"] = tb.lo;
        j["theory_typical_lo_tight_per_k"] = tb.lo_tight;
        j["theory_typical_hi_per_k"] = tb.hi;
        if (mode == MobileMode::typical)
        {
            j["ratio_to_lo"] = fit.slope / tb.lo;
            j["ratio_to_hi"] = fit.slope / tb.hi;
        }
    }
    return j;
}

inline void run_sweep(const RunConfig& cfg, Report& r)
{
    r.columns = estimate_columns();
    const std::vector<SweepPoint> points = in_stage(
        "simulate", [&] { return sweep_k(cfg.params, cfg.k_values, cfg.n_trials, cfg.mode, cfg.threads); });
    for (const auto& s : points)
        r.rows.push_back(estimate_row(s.K, s.params, s.estimate));
    r.metadata["fit"] = in_stage("fit", [&] { return sweep_fit(points, cfg.params, cfg.mode); });
}

inline void run_tail(const RunConfig& cfg, Report& r)
{
    const SimParams& p = cfg.params;
    r.columns = {"x", "n", "exceed", "ccdf", "ci_lo", "ci_hi", "psi_hat"};
    const bool link = cfg.tail == TailKind::link_power;
    if (link)
    {
        r.columns.insert(r.columns.end(), {"oracle_ccdf", "exponent_asymptotic"});
    }
    else
    {
        r.columns.insert(r.columns.end(), {"band_lo", "band_hi"});
        r.metadata["outer_radius"] = cfg.outer_factor * cfg.r;
    }

    const TailCurve t = in_stage("simulate", [&] {
        return link ? estimate_link_power_tail(p, cfg.x_grid, cfg.n_trials, cfg.threads)
                    : estimate_shot_noise_tail(p, cfg.r, cfg.outer_factor * cfg.r, cfg.x_grid,
                                               cfg.n_trials, cfg.threads);
    });
    for (std::size_t i = 0; i < t.thresholds.size(); ++i)
    {
        const double x = t.thresholds[i];
        std::vector<json> row{x, t.n, t.exceed[i], t.ccdf[i], t.ci_lo[i], t.ci_hi[i],
                              t.exceed[i] > 0 ? json(-std::log(t.ccdf[i])) : json(nullptr)};
        if (link)
        {
            row.push_back(in_stage("quadrature", [&] { return lemma1_oracle(p, x); }));
            row.push_back(lemma1_exponent(p, x));
        }
        else if (x > 0.0)
        {
            const ExponentBand b = corollary1_band(p, cfg.r, x);
            row.push_back(b.lo);
            row.push_back(b.hi);
        }
        else
        {
            row.push_back(nullptr);
            row.push_back(nullptr);
        }
        r.rows.push_back(std::move(row));
    }
}

inline void run_geomcheck(const RunConfig& cfg, Report& r)
{
    r.columns = {"law", "nu", "n", "ks_statistic"};
    const SimParams& p = cfg.params;
    const double ks_l = in_stage("simulate", [&] {
        const auto l = sample_nearest_bs_distances(p, cfg.geom_samples, cfg.threads);
        return ks_statistic(l, [&](double tau) { return 1.0 - nearest_distance_ccdf(p.lambda, tau); });
    });
    r.rows.push_back({"nearest_distance", nullptr, cfg.geom_samples, ks_l});

    const double rho = HexLattice(p.eta, 0).rho();
    for (double nu : cfg.geom_nu)
    {
        const double ks_d = in_stage("simulate", [&] {
            const auto d = sample_depth_margins(p, nu, cfg.geom_samples, cfg.threads);
            const double a = std::sqrt(nu) * rho;
            return ks_statistic(d, [&](double x) {
                return 1.0 - boundary_distance_ccdf(nu, rho, std::clamp(x, 0.0, a));
            });
        });
        r.rows.push_back({"boundary_distance", nu, cfg.geom_samples, ks_d});
    }
}

inline void run_convergence(const RunConfig& cfg, Report& r)
{
    r.columns = {"rings", "n", "n_outage", "p_hat", "ci_lo", "ci_hi", "acceptance_rate"};
    std::vector<OutageEstimate> est;
    for (int rings : cfg.rings_sweep)
    {
        SimParams p = cfg.params;
        p.rings = rings;
        est.push_back(in_stage("simulate", [&] { return estimate_outage(p, cfg.mode, cfg.n_trials, cfg.threads); }));
        const OutageEstimate& e = est.back();
        r.rows.push_back({rings, e.n_accepted, e.n_outage, e.p_hat, e.ci_lo, e.ci_hi, e.acceptance_rate});
    }
    json pairs = json::array();
    for (std::size_t i = 0; i + 1 < est.size(); ++i)
    {
        pairs.push_back({{"rings", {cfg.rings_sweep[i], cfg.rings_sweep[i + 1]}},
                         {"abs_diff", std::abs(est[i].p_hat - est[i + 1].p_hat)},
                         {"within_ci", intervals_overlap(est[i], est[i + 1])}});
    }
    r.metadata["adjacent"] = pairs;
}

} // namespace detail

/*!
 * Execute one command. Metadata carries the resolved config, the code
 * version and the wall time. Throws ParameterError for invalid input and
 * StageError for engine failures.
 */
inline Report dispatch(const RunConfig& cfg)
{
    const auto start = std::chrono::steady_clock::now();
    Report r;
    r.command = std::string(to_string(cfg.command));
    r.metadata["version"] = kVersion;
    r.metadata["config"] = config_to_json(cfg);
    switch (cfg.command)
    {
    case Command::theory: detail::run_theory(cfg, r); break;
    case Command::outage: detail::run_outage(cfg, r); break;
    case Command::sweep: detail::run_sweep(cfg, r); break;
    case Command::tail: detail::run_tail(cfg, r); break;
    case Command::geomcheck: detail::run_geomcheck(cfg, r); break;
    case Command::convergence: detail::run_convergence(cfg, r); break;
    }
    r.metadata["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

} // namespace coopnet

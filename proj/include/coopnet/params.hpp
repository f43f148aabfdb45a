#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "error.hpp"

namespace coopnet {

/// How the distance from an interfering BS to its own served mobile is drawn.
enum class LinkMode
{
    exact_cell, ///< mobile uniform in the BS's Voronoi cell
    rayleigh,   ///< Pr(L >= t) = exp(-pi lambda t^2), uniform bearing
};

/// Side-lobe gain law toward unintended mobiles.
enum class SidelobeMode
{
    constant, ///< G = delta
    uniform,  ///< G ~ U(delta/2, delta]
};

constexpr std::string_view to_string(LinkMode m) noexcept
{
    return m == LinkMode::exact_cell ? "exact_cell" : "rayleigh";
}

constexpr std::string_view to_string(SidelobeMode m) noexcept
{
    return m == SidelobeMode::constant ? "constant" : "uniform";
}

/*!
 * Model constants and simulation controls.
 *
 * Densities: lambda (BSs per unit area), eta (clusters per unit area).
 * nu is the fraction of each cluster region forming the interior zone,
 * alpha the path-loss exponent, [delta1, delta2] the main-lobe support,
 * delta the side-lobe cap and theta the SIR threshold.
 */
struct SimParams
{
    double lambda = 1.0;
    double eta = 0.1;
    double nu = 0.25;
    double alpha = 4.0;
    double delta1 = 1.0;
    double delta2 = 1.0;
    double delta = 0.1;
    double theta = 1.0;
    /// Nulling capacity M (a BS nulls up to M - 1 mobiles); nullopt = unlimited.
    std::optional<unsigned> m_antennas;
    int rings = 3;
    LinkMode link_mode = LinkMode::rayleigh;
    SidelobeMode sidelobe_mode = SidelobeMode::constant;
    std::uint64_t seed = 0;
    /// Candidate budget per mobile placement in exact_cell mode.
    std::size_t exact_cell_budget = 10000;

    /// Average number of BSs per cluster.
    double K() const noexcept { return lambda / eta; }

    friend bool operator==(const SimParams&, const SimParams&) = default;
};

namespace detail {

inline bool positive_finite(double v) noexcept { return v > 0.0 && std::isfinite(v); }

} // namespace detail

/// Throws ParameterError naming the first offending key.
inline void validate(const SimParams& p)
{
    using detail::positive_finite;
    if (!positive_finite(p.lambda))
        throw ParameterError("lambda", "BS density must be positive");
    if (!positive_finite(p.eta))
        throw ParameterError("eta", "cluster density must be positive");
    if (!(p.nu > 0.0 && p.nu <= 1.0))
        throw ParameterError("nu", "interior fraction must lie in (0, 1]");
    if (!(p.alpha > 2.0) || !std::isfinite(p.alpha))
        throw ParameterError("alpha",
                             "path-loss exponent must exceed 2 (far-field interference diverges)");
    if (!positive_finite(p.delta1))
        throw ParameterError("delta1", "main-lobe lower bound must be positive");
    if (!positive_finite(p.delta2))
        throw ParameterError("delta2", "main-lobe upper bound must be positive");
    if (p.delta1 > p.delta2)
        throw ParameterError("delta1", "main-lobe bounds require delta1 <= delta2");
    if (!positive_finite(p.delta))
        throw ParameterError("delta", "side-lobe cap must be positive");
    if (!positive_finite(p.theta))
        throw ParameterError("theta", "SIR threshold must be positive");
    if (p.m_antennas && *p.m_antennas < 1)
        throw ParameterError("m_antennas", "antenna count must be at least 1");
    if (p.rings < 0)
        throw ParameterError("rings", "ring count must be non-negative");
    if (p.exact_cell_budget < 1)
        throw ParameterError("exact_cell_budget", "placement budget must be positive");
}

} // namespace coopnet

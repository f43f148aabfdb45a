#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"
#include "params.hpp"
#include "rng.hpp"

namespace coopnet {

enum class Zone
{
    interior,
    edge,
};

/// Where the typical mobile is placed for a trial.
enum class MobileMode
{
    center,  ///< at the central cluster center
    typical, ///< uniform in the central cluster interior
};

constexpr std::string_view to_string(MobileMode m) noexcept
{
    return m == MobileMode::center ? "center" : "typical";
}

/// Apothem of the interior hexagon, sqrt(nu) rho.
inline double interior_apothem(const HexLattice& lattice, double nu) noexcept
{
    return std::sqrt(nu) * lattice.rho();
}

/// x^alpha, with a multiply-only path for the common alpha = 4.
inline double pow_alpha(double x, double alpha) noexcept
{
    if (alpha == 4.0)
    {
        const double x2 = x * x;
        return x2 * x2;
    }
    return std::pow(x, alpha);
}

struct ZoneAssignment
{
    std::size_t cluster = 0;
    double depth = 0.0;
    Zone zone = Zone::interior;
};

inline Zone zone_for_depth(double depth, const HexLattice& lattice, double nu) noexcept
{
    // nu == 1 puts the whole region in the interior, boundary rounding included.
    return nu >= 1.0 || depth <= interior_apothem(lattice, nu) ? Zone::interior : Zone::edge;
}

inline ZoneAssignment assign_zone(Point bs, const HexLattice& lattice, double nu)
{
    ZoneAssignment out;
    out.cluster = nearest_center(bs, lattice);
    out.depth = hex_depth(bs, lattice.centers()[out.cluster], lattice);
    out.zone = zone_for_depth(out.depth, lattice, nu);
    return out;
}

/// Interior iff the BS's depth in its own cluster region is at most sqrt(nu) rho.
inline Zone classify_zone(Point bs, const HexLattice& lattice, double nu)
{
    if (!(nu > 0.0 && nu <= 1.0))
        throw ParameterError("nu", "interior fraction must lie in (0, 1]");
    return assign_zone(bs, lattice, nu).zone;
}

/// Main-lobe response W ~ U[delta1, delta2].
template <class Rng>
double draw_mainlobe_gain(const SimParams& p, Rng& rng)
{
    return uniform(rng, p.delta1, p.delta2);
}

/// Side-lobe response toward an unintended mobile, 0 < G <= delta.
/// The constant mode consumes no randomness.
template <class Rng>
double sidelobe_gain(const SimParams& p, Rng& rng)
{
    if (p.sidelobe_mode == SidelobeMode::constant)
        return p.delta;
    return p.delta * (1.0 - 0.5 * uniform01(rng));
}

/// Power control P = L^alpha / W, giving unit receive power at the served mobile.
inline double tx_power(double link_distance, double alpha, double mainlobe_gain)
{
    if (!(mainlobe_gain > 0.0))
        throw ParameterError("W", "main-lobe gain must be positive");
    if (link_distance < 0.0)
        throw ParameterError("L", "link distance must be non-negative");
    return pow_alpha(link_distance, alpha) / mainlobe_gain;
}

/// A served mobile and the link to it.
struct ServedLink
{
    Point mobile;
    double distance = 0.0;
    double mainlobe_gain = 1.0;
    double tx_power = 0.0;
};

struct BsRecord
{
    Point position;
    std::size_t cluster = 0;
    Zone zone = Zone::interior;
    /// Depth of the BS in its own cluster region.
    double depth = 0.0;
    /// Filled for interior BSs of accepted topologies; edge BSs use the
    /// other sub-channel and carry no link here.
    std::optional<ServedLink> link;
};

struct ServedMobile
{
    Point mobile;
    double distance = 0.0;
};

namespace detail {

// Certify that the cell of `bs` (clipped to the window) lies inside the disk
// of radius r around it: every probe on the circle is outside the window or
// strictly closer, by more than the probe spacing, to some other BS.
inline bool cell_within_disk(std::size_t bs, std::span<const Point> positions,
                             const StudyRegion& region, double r)
{
    constexpr int kProbes = 48;
    const Point y = positions[bs];
    const double spacing = 2.0 * std::numbers::pi * r / kProbes;
    for (int k = 0; k < kProbes; ++k)
    {
        const double phi = 2.0 * std::numbers::pi * k / kProbes;
        const Point probe{y.x + r * std::cos(phi), y.y + r * std::sin(phi)};
        if (!region.contains(probe))
            continue;
        bool covered = false;
        for (std::size_t j = 0; j < positions.size() && !covered; ++j)
            covered = j != bs && distance(probe, positions[j]) < r - spacing;
        if (!covered)
            return false;
    }
    return true;
}

} // namespace detail

/*!
 * Draw the mobile served by BS `bs`.
 *
 * rayleigh: L from the nearest-distance law, uniform bearing.
 * exact_cell: uniform in the BS's Voronoi cell within the window, by rejection
 * from a disk around the BS. The disk radius starts at 2 / sqrt(pi lambda) and
 * grows by 1.5x until the clipped cell is certified to fit inside it. Throws
 * RealizationRejected when the candidate budget is exhausted.
 */
template <class Rng>
ServedMobile place_served_mobile(std::size_t bs, std::span<const Point> positions,
                                 const StudyRegion& region, const SimParams& p, Rng& rng)
{
    const Point y = positions[bs];
    if (p.link_mode == LinkMode::rayleigh)
    {
        const double l = sample_nearest_distance(p.lambda, rng);
        const double phi = 2.0 * std::numbers::pi * uniform01(rng);
        return {{y.x + l * std::cos(phi), y.y + l * std::sin(phi)}, l};
    }

    const Point lo = region.box_lo();
    const Point hi = region.box_hi();
    const double window_span = std::hypot(hi.x - lo.x, hi.y - lo.y);
    double r_cap = 2.0 / std::sqrt(std::numbers::pi * p.lambda);
    while (r_cap < window_span && !detail::cell_within_disk(bs, positions, region, r_cap))
        r_cap *= 1.5;

    for (std::size_t attempt = 0; attempt < p.exact_cell_budget; ++attempt)
    {
        const double rr = r_cap * std::sqrt(uniform01(rng));
        const double phi = 2.0 * std::numbers::pi * uniform01(rng);
        const Point c{y.x + rr * std::cos(phi), y.y + rr * std::sin(phi)};
        if (!region.contains(c))
            continue;
        if (nearest_bs(c, positions).index == bs)
            return {c, distance(c, y)};
    }
    throw RealizationRejected("exact-cell mobile placement exhausted its candidate budget");
}

/*!
 * One network realization around the central cluster.
 *
 * Holds the window it was drawn in; the typical mobile is served by its
 * nearest BS and the realization is accepted only when that BS is an interior
 * BS of the central cluster (index 0).
 */
struct Topology
{
    SimParams params;
    std::shared_ptr<const StudyRegion> region;
    std::vector<BsRecord> bss;
    Point target_mobile;
    std::size_t serving_bs = 0;
    bool accepted = false;

    const HexLattice& lattice() const noexcept { return region->lattice(); }
};

inline std::shared_ptr<const StudyRegion> make_window(const SimParams& p)
{
    return std::make_shared<const StudyRegion>(HexLattice(p.eta, p.rings));
}

template <class Rng>
Topology build_topology(const SimParams& p, std::shared_ptr<const StudyRegion> region,
                        MobileMode mode, Rng& rng)
{
    Topology topo;
    topo.params = p;
    topo.region = std::move(region);
    const HexLattice& lattice = topo.lattice();

    const std::vector<ClusteredPoint> drawn = sample_ppp_clustered(p.lambda, *topo.region, rng);
    std::vector<Point> positions;
    positions.reserve(drawn.size());
    topo.bss.reserve(drawn.size());
    for (const ClusteredPoint& y : drawn)
    {
        const double depth = hex_depth(y.position, lattice.centers()[y.cluster], lattice);
        topo.bss.push_back(BsRecord{y.position, y.cluster, zone_for_depth(depth, lattice, p.nu),
                                    depth, std::nullopt});
        positions.push_back(y.position);
    }

    const Point origin = lattice.centers()[0];
    topo.target_mobile = mode == MobileMode::center
                             ? origin
                             : sample_uniform_hexagon(origin, interior_apothem(lattice, p.nu),
                                                      lattice, rng);
    if (positions.empty())
        return topo;

    topo.serving_bs = nearest_bs(topo.target_mobile, positions).index;
    const BsRecord& serving = topo.bss[topo.serving_bs];
    topo.accepted = serving.cluster == 0 && serving.zone == Zone::interior;
    if (!topo.accepted)
        return topo;

    for (std::size_t i = 0; i < topo.bss.size(); ++i)
    {
        BsRecord& bs = topo.bss[i];
        if (bs.zone != Zone::interior)
            continue;
        ServedMobile m;
        if (i == topo.serving_bs)
            m = {topo.target_mobile, distance(topo.target_mobile, bs.position)};
        else
            m = place_served_mobile(i, positions, *topo.region, p, rng);
        const double w = draw_mainlobe_gain(p, rng);
        bs.link = ServedLink{m.mobile, m.distance, w, tx_power(m.distance, p.alpha, w)};
    }
    return topo;
}

struct Interferer
{
    std::size_t bs = 0;
    double gain = 0.0;
};

namespace detail {

// Whether central-cluster BS `bs` steers a null toward the target mobile.
inline bool nulls_target(const Topology& topo, std::size_t bs, std::span<const std::size_t> cluster)
{
    const std::size_t others = cluster.size() - 1;
    const auto& m = topo.params.m_antennas;
    if (!m || others <= *m - 1)
        return true;
    if (*m <= 1)
        return false;

    // Null toward the M - 1 nearest co-cluster served mobiles (lowest BS index on ties).
    const Point y = topo.bss[bs].position;
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(others);
    for (std::size_t j : cluster)
    {
        if (j != bs)
            ranked.emplace_back(norm2(topo.bss[j].link->mobile - y), j);
    }
    const std::size_t keep = *m - 1;
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                      ranked.end());
    for (std::size_t k = 0; k < keep; ++k)
    {
        if (ranked[k].second == topo.serving_bs)
            return true;
    }
    return false;
}

} // namespace detail

/*!
 * Co-channel interferers of the target mobile: every interior BS other than
 * the serving one, with its side-lobe gain toward the target. Interior BSs of
 * other clusters always interfere; central-cluster BSs get gain 0 when they
 * null the target. Edge BSs are on the other sub-channel and never appear.
 */
template <class Rng>
std::vector<Interferer> co_channel_interferers(const Topology& topo, Rng& rng)
{
    std::vector<Interferer> out;
    if (!topo.accepted)
        return out;

    std::vector<std::size_t> central;
    for (std::size_t i = 0; i < topo.bss.size(); ++i)
    {
        if (topo.bss[i].zone == Zone::interior && topo.bss[i].cluster == 0)
            central.push_back(i);
    }

    for (std::size_t i = 0; i < topo.bss.size(); ++i)
    {
        const BsRecord& bs = topo.bss[i];
        if (bs.zone != Zone::interior || i == topo.serving_bs)
            continue;
        if (bs.cluster == 0 && detail::nulls_target(topo, i, central))
            out.push_back({i, 0.0});
        else
            out.push_back({i, sidelobe_gain(topo.params, rng)});
    }
    return out;
}

/// Total received interference sum P_Y G |U - Y|^-alpha at the target mobile.
inline double interference_power(const Topology& topo, std::span<const Interferer> interferers)
{
    double total = 0.0;
    const double alpha = topo.params.alpha;
    for (const Interferer& it : interferers)
    {
        if (it.gain == 0.0)
            continue;
        const BsRecord& bs = topo.bss[it.bs];
        const double d = distance(topo.target_mobile, bs.position);
        total += bs.link->tx_power * it.gain / pow_alpha(d, alpha);
    }
    return total;
}

} // namespace coopnet

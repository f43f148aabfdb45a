#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace coopnet {

inline constexpr double kSqrt3 = std::numbers::sqrt3;

namespace detail {

// std::round semantics (half away from zero) without the libm call.
constexpr double round_half_away(double x) noexcept
{
    const double t = static_cast<double>(static_cast<std::int64_t>(x));
    const double frac = x - t;
    if (frac >= 0.5)
        return t + 1.0;
    if (frac <= -0.5)
        return t - 1.0;
    return t;
}

} // namespace detail

struct Point
{
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point operator+(Point a, Point b) noexcept { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point operator-(Point a, Point b) noexcept { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point operator*(double s, Point a) noexcept { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Point, Point) = default;
};

constexpr double dot(Point a, Point b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double norm2(Point a) noexcept { return dot(a, a); }
inline double norm(Point a) noexcept { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) noexcept { return norm(a - b); }
inline bool is_finite(Point a) noexcept { return std::isfinite(a.x) && std::isfinite(a.y); }

/// Axial coordinates on the cluster-center lattice: position = 2 rho (q u0 + r u1).
struct AxialCoord
{
    int q = 0;
    int r = 0;

    friend constexpr bool operator==(AxialCoord, AxialCoord) = default;
};

constexpr int hex_distance(AxialCoord a) noexcept
{
    const int s = -a.q - a.r;
    return (std::abs(a.q) + std::abs(a.r) + std::abs(s)) / 2;
}

/*!
 * Hexagonal lattice of cluster centers.
 *
 * The central center sits at the origin and `rings` concentric rings surround
 * it (ring k holds 6k centers). Neighbor directions are fixed at 0, 60, ...,
 * 300 degrees; nearest neighbors are 2 rho apart where rho is the apothem of
 * the hexagonal cluster region, rho^2 = 1 / (2 sqrt(3) eta), so each region
 * has area 1 / eta.
 *
 * Centers are indexed ring by ring, starting with the origin at index 0.
 */
class HexLattice
{
  public:
    HexLattice(double eta, int rings)
    {
        if (!(eta > 0.0) || !std::isfinite(eta))
            throw ParameterError("eta", "cluster density must be positive");
        if (rings < 0)
            throw ParameterError("rings", "ring count must be non-negative");

        eta_ = eta;
        rings_ = rings;
        rho_ = std::sqrt(1.0 / (2.0 * kSqrt3 * eta));

        const int side = 2 * rings + 1;
        slot_.assign(static_cast<std::size_t>(side) * side, -1);

        push(AxialCoord{0, 0});
        for (int k = 1; k <= rings; ++k)
        {
            AxialCoord a{k * kAxialDirs[4].q, k * kAxialDirs[4].r};
            for (int side_dir = 0; side_dir < 6; ++side_dir)
            {
                for (int step = 0; step < k; ++step)
                {
                    push(a);
                    a = {a.q + kAxialDirs[side_dir].q, a.r + kAxialDirs[side_dir].r};
                }
            }
        }
    }

    double eta() const noexcept { return eta_; }
    int rings() const noexcept { return rings_; }
    /// Apothem of a cluster region.
    double rho() const noexcept { return rho_; }
    /// Center-to-vertex distance of a cluster region, 2 rho / sqrt(3).
    double circumradius() const noexcept { return 2.0 * rho_ / kSqrt3; }
    double cluster_area() const noexcept { return 1.0 / eta_; }

    std::span<const Point> centers() const noexcept { return centers_; }
    std::span<const AxialCoord> axial() const noexcept { return axial_; }
    std::size_t size() const noexcept { return centers_.size(); }
    static constexpr const std::array<Point, 6>& neighbor_dirs() noexcept { return kNeighborDirs; }

    Point position(AxialCoord a) const noexcept
    {
        const double s = 2.0 * rho_;
        return {s * (a.q + 0.5 * a.r), s * (0.5 * kSqrt3 * a.r)};
    }

    /// Nearest point of the infinite lattice (cube rounding in axial space).
    AxialCoord locate(Point p) const noexcept
    {
        const double fr = p.y / (kSqrt3 * rho_);
        const double fq = p.x / (2.0 * rho_) - 0.5 * fr;
        const double fs = -fq - fr;
        double q = detail::round_half_away(fq);
        double r = detail::round_half_away(fr);
        const double s = detail::round_half_away(fs);
        const double dq = std::abs(q - fq);
        const double dr = std::abs(r - fr);
        const double ds = std::abs(s - fs);
        if (dq > dr && dq > ds)
            q = -r - s;
        else if (dr > ds)
            r = -q - s;
        return {static_cast<int>(q), static_cast<int>(r)};
    }

    /// Index of a lattice point if it belongs to this finite lattice.
    std::optional<std::size_t> index_of(AxialCoord a) const noexcept
    {
        if (hex_distance(a) > rings_)
            return std::nullopt;
        const int side = 2 * rings_ + 1;
        const int slot = slot_[static_cast<std::size_t>((a.q + rings_) * side + (a.r + rings_))];
        return static_cast<std::size_t>(slot);
    }

    static constexpr std::array<AxialCoord, 6> kAxialDirs{{
        {1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}}};

  private:
    void push(AxialCoord a)
    {
        const int side = 2 * rings_ + 1;
        slot_[static_cast<std::size_t>((a.q + rings_) * side + (a.r + rings_))] =
            static_cast<int>(centers_.size());
        axial_.push_back(a);
        centers_.push_back(position(a));
    }

    static constexpr std::array<Point, 6> kNeighborDirs{{
        {1.0, 0.0},
        {0.5, 0.5 * kSqrt3},
        {-0.5, 0.5 * kSqrt3},
        {-1.0, 0.0},
        {-0.5, -0.5 * kSqrt3},
        {0.5, -0.5 * kSqrt3}}};

    double eta_ = 1.0;
    int rings_ = 0;
    double rho_ = 1.0;
    std::vector<Point> centers_;
    std::vector<AxialCoord> axial_;
    std::vector<int> slot_;
};

inline HexLattice build_lattice(double eta, int rings) { return HexLattice(eta, rings); }

/*!
 * Argmin over lattice centers of the Euclidean distance to p, lowest index on
 * ties. Points inside the lattice window are resolved from the rounded cell
 * and its six neighbors; points outside fall back to a full scan.
 */
inline std::size_t nearest_center(Point p, const HexLattice& lattice)
{
    const auto centers = lattice.centers();
    const AxialCoord home = lattice.locate(p);
    const auto home_index = lattice.index_of(home);
    if (!home_index)
    {
        std::size_t best = 0;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < centers.size(); ++i)
        {
            const double d2 = norm2(p - centers[i]);
            if (d2 < best_d2)
            {
                best_d2 = d2;
                best = i;
            }
        }
        return best;
    }

    std::size_t best = *home_index;
    double best_d2 = norm2(p - centers[best]);
    for (const auto& dir : HexLattice::kAxialDirs)
    {
        const auto idx = lattice.index_of({home.q + dir.q, home.r + dir.r});
        if (!idx)
            continue;
        const double d2 = norm2(p - centers[*idx]);
        if (d2 < best_d2 || (d2 == best_d2 && *idx < best))
        {
            best_d2 = d2;
            best = *idx;
        }
    }
    return best;
}

/*!
 * Hexagonal membership depth m(p) = max_u <p - center, u> over the six
 * neighbor directions. p lies in the hexagon of apothem a around center iff
 * m(p) <= a, and a - m(p) is then its distance to that hexagon's boundary.
 */
inline double hex_depth(Point p, Point center, const HexLattice&) noexcept
{
    const Point v = p - center;
    double m = -std::numeric_limits<double>::infinity();
    for (const Point& u : HexLattice::neighbor_dirs())
        m = std::max(m, dot(v, u));
    return m;
}

/// A set of cluster regions used as the simulation window.
class StudyRegion
{
  public:
    /// Window made of every cluster region of the lattice.
    explicit StudyRegion(HexLattice lattice) : lattice_(std::move(lattice))
    {
        std::vector<std::size_t> all(lattice_.size());
        for (std::size_t i = 0; i < all.size(); ++i)
            all[i] = i;
        set_members(std::move(all));
    }

    StudyRegion(HexLattice lattice, std::vector<std::size_t> members)
        : lattice_(std::move(lattice))
    {
        set_members(std::move(members));
    }

    const HexLattice& lattice() const noexcept { return lattice_; }
    std::span<const std::size_t> members() const noexcept { return members_; }
    bool is_member(std::size_t center) const noexcept
    {
        return center < member_flag_.size() && member_flag_[center];
    }
    double area() const noexcept
    {
        return static_cast<double>(members_.size()) * lattice_.cluster_area();
    }

    /// True when p's nearest point of the infinite lattice is a member center.
    bool contains(Point p) const noexcept
    {
        const auto idx = lattice_.index_of(lattice_.locate(p));
        return idx && member_flag_[*idx];
    }

    // Bounding box of the member regions (empty when there are no members).
    Point box_lo() const noexcept { return lo_; }
    Point box_hi() const noexcept { return hi_; }

  private:
    void set_members(std::vector<std::size_t> members)
    {
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        member_flag_.assign(lattice_.size(), false);
        for (std::size_t m : members)
        {
            if (m >= lattice_.size())
                throw ParameterError("members", "cluster index outside the lattice");
            member_flag_[m] = true;
        }
        members_ = std::move(members);

        if (members_.empty())
            return;
        const double cr = lattice_.circumradius();
        lo_ = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        hi_ = {-lo_.x, -lo_.y};
        for (std::size_t m : members_)
        {
            const Point c = lattice_.centers()[m];
            lo_ = {std::min(lo_.x, c.x - cr), std::min(lo_.y, c.y - cr)};
            hi_ = {std::max(hi_.x, c.x + cr), std::max(hi_.y, c.y + cr)};
        }
    }

    HexLattice lattice_;
    std::vector<std::size_t> members_;
    std::vector<bool> member_flag_;
    Point lo_{};
    Point hi_{};
};

/*!
 * Homogeneous PPP of density lambda over the study region: a Poisson number of
 * uniform points over the bounding box, keeping those whose nearest lattice
 * center is a member of the region.
 */
template <class Rng>
std::vector<Point> sample_ppp(double lambda, const StudyRegion& region, Rng& rng)
{
    if (!(lambda > 0.0))
        throw ParameterError("lambda", "density must be positive");
    std::vector<Point> points;
    if (region.members().empty())
        return points;

    const Point lo = region.box_lo();
    const Point hi = region.box_hi();
    const double box_area = (hi.x - lo.x) * (hi.y - lo.y);
    std::poisson_distribution<std::int64_t> count_dist(lambda * box_area);
    const std::int64_t n = count_dist(rng);
    points.reserve(static_cast<std::size_t>(static_cast<double>(n) * region.area() / box_area) + 16);
    for (std::int64_t i = 0; i < n; ++i)
    {
        const Point p{uniform(rng, lo.x, hi.x), uniform(rng, lo.y, hi.y)};
        if (region.contains(p))
            points.push_back(p);
    }
    return points;
}

/// A PPP point tagged with the cluster region it was drawn in.
struct ClusteredPoint
{
    Point position;
    std::size_t cluster = 0;
};

/*!
 * Homogeneous PPP of density lambda over the study region, drawn region by
 * region: an independent Poisson(lambda / eta) count per member cluster,
 * placed uniformly in its hexagon by picking one of the three rhombi that
 * tile it. Same law as sample_ppp, with the cluster known by construction.
 */
template <class Rng>
std::vector<ClusteredPoint> sample_ppp_clustered(double lambda, const StudyRegion& region, Rng& rng)
{
    if (!(lambda > 0.0))
        throw ParameterError("lambda", "density must be positive");
    const HexLattice& lattice = region.lattice();
    std::vector<ClusteredPoint> points;
    std::poisson_distribution<std::int64_t> count_dist(lambda * lattice.cluster_area());

    // Vertices sit at 30 + 60k degrees; rhombus k spans vertices 2k and 2k + 2.
    const double cr = lattice.circumradius();
    std::array<Point, 6> v;
    for (int k = 0; k < 6; ++k)
    {
        const double phi = std::numbers::pi / 6.0 + k * std::numbers::pi / 3.0;
        v[static_cast<std::size_t>(k)] = {cr * std::cos(phi), cr * std::sin(phi)};
    }

    for (std::size_t m : region.members())
    {
        const Point c = lattice.centers()[m];
        const std::int64_t n = count_dist(rng);
        for (std::int64_t i = 0; i < n; ++i)
        {
            const double u = 3.0 * uniform01(rng);
            const auto k = static_cast<std::size_t>(u);
            const double s = uniform01(rng);
            const double t = uniform01(rng);
            const Point a = v[2 * k];
            const Point b = v[(2 * k + 2) % 6];
            points.push_back({{c.x + s * a.x + t * b.x, c.y + s * a.y + t * b.y}, m});
        }
    }
    return points;
}

/// Uniform point in the hexagon of the given apothem, with the number of
/// disk proposals it took.
struct HexagonSample
{
    Point point;
    std::uint64_t proposals = 0;
};

template <class Rng>
HexagonSample sample_uniform_hexagon_counted(Point center, double apothem,
                                             const HexLattice& lattice, Rng& rng)
{
    if (!(apothem > 0.0))
        throw ParameterError("apothem", "hexagon apothem must be positive");
    const double radius = 2.0 * apothem / kSqrt3;
    HexagonSample out;
    for (;;)
    {
        ++out.proposals;
        const double rr = radius * std::sqrt(uniform01(rng));
        const double phi = 2.0 * std::numbers::pi * uniform01(rng);
        const Point p{center.x + rr * std::cos(phi), center.y + rr * std::sin(phi)};
        if (hex_depth(p, center, lattice) <= apothem)
        {
            out.point = p;
            return out;
        }
    }
}

/// Uniform point in the hexagon C(center, apothem) by rejection from its
/// circumscribed disk.
template <class Rng>
Point sample_uniform_hexagon(Point center, double apothem, const HexLattice& lattice, Rng& rng)
{
    return sample_uniform_hexagon_counted(center, apothem, lattice, rng).point;
}

struct NearestBs
{
    std::size_t index = 0;
    double distance = 0.0;
};

/// Nearest base station to u (lowest index on ties). `proj` maps an element
/// of `bss` to its Point.
template <class Range, class Proj = std::identity>
NearestBs nearest_bs(Point u, const Range& bss, Proj proj = {})
{
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    for (const auto& bs : bss)
    {
        const double d2 = norm2(u - std::invoke(proj, bs));
        if (d2 < best_d2)
        {
            best_d2 = d2;
            best = i;
        }
        ++i;
    }
    if (i == 0)
        throw DegenerateRealization("no base station in the realization");
    return {best, std::sqrt(best_d2)};
}

} // namespace coopnet

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "error.hpp"
#include "params.hpp"

namespace coopnet {

//---------------------------------------------------------------------------//
// Exponent scaling laws
//---------------------------------------------------------------------------//

namespace detail {

// (delta1 / (delta theta))^(1/alpha)
inline double beam_ratio_root(const SimParams& p) noexcept
{
    return std::pow(p.delta1 / (p.delta * p.theta), 1.0 / p.alpha);
}

} // namespace detail

/// d psi / dK for a mobile at the cluster center:
/// pi / (2 sqrt 3) (delta1 / (delta theta))^(2/alpha) (2 - sqrt nu)^2.
inline double center_exponent_constant(const SimParams& p)
{
    const double x = detail::beam_ratio_root(p);
    const double gap = 2.0 - std::sqrt(p.nu);
    return std::numbers::pi / (2.0 * std::numbers::sqrt3) * x * x * gap * gap;
}

inline double exponent_center(const SimParams& p, double k)
{
    return center_exponent_constant(p) * k;
}

enum class ExponentRegime
{
    exponential,
    /// nu = 1: the outage probability decays slower than any exponential in K.
    non_exponential,
};

/*!
 * Asymptotic band for the typical-mobile exponent.
 *
 * With N = (2 pi / sqrt 3) x^2 (1 - sqrt nu)^2 K and x = (delta1 / (delta theta))^(1/alpha):
 * hi = N, lo = N / (1 + 4x)^2. lo_tight = N / (1 + 2x)^2 is the constant that
 * follows from the intermediate lower bound on rho; both are reported.
 */
struct TypicalBounds
{
    double lo = 0.0;
    double hi = 0.0;
    double lo_tight = 0.0;
    ExponentRegime regime = ExponentRegime::exponential;
};

inline TypicalBounds exponent_typical_bounds(const SimParams& p, double k)
{
    TypicalBounds b;
    if (p.nu >= 1.0)
    {
        b.regime = ExponentRegime::non_exponential;
        return b;
    }
    const double x = detail::beam_ratio_root(p);
    const double gap = 1.0 - std::sqrt(p.nu);
    const double n = 2.0 * std::numbers::pi / std::numbers::sqrt3 * x * x * gap * gap * k;
    b.hi = n;
    b.lo = n / ((1.0 + 4.0 * x) * (1.0 + 4.0 * x));
    b.lo_tight = n / ((1.0 + 2.0 * x) * (1.0 + 2.0 * x));
    return b;
}

//---------------------------------------------------------------------------//
// Link-power tail
//---------------------------------------------------------------------------//

/// Asymptotic exponent of Pr(P G > x): pi lambda (delta1/delta)^(2/alpha) x^(2/alpha).
inline double lemma1_exponent(const SimParams& p, double x)
{
    const double gamma = 2.0 / p.alpha;
    return std::numbers::pi * p.lambda * std::pow(p.delta1 / p.delta, gamma) * std::pow(x, gamma);
}

/*!
 * Law of beta = W / G induced by the configured main-lobe and side-lobe
 * models, with its density in closed form.
 *
 * W ~ U[w1, w2] (point mass if w1 == w2); G = delta (constant mode) or
 * G ~ U(delta/2, delta] (uniform mode).
 */
class BetaLaw
{
  public:
    explicit BetaLaw(const SimParams& p)
        : w1_(p.delta1), w2_(p.delta2), g2_(p.delta),
          g1_(p.sidelobe_mode == SidelobeMode::constant ? p.delta : 0.5 * p.delta)
    {
    }

    double lo() const noexcept { return w1_ / g2_; }
    double hi() const noexcept { return w2_ / g1_; }
    bool is_point_mass() const noexcept { return w1_ == w2_ && g1_ == g2_; }

    double density(double b) const noexcept
    {
        if (b < lo() || b > hi())
            return 0.0;
        const bool w_fixed = w1_ == w2_;
        const bool g_fixed = g1_ == g2_;
        if (g_fixed)
            return g2_ / (w2_ - w1_);
        if (w_fixed)
            return w1_ / (b * b * (g2_ - g1_));
        const double l = std::max(g1_, w1_ / b);
        const double h = std::min(g2_, w2_ / b);
        if (h <= l)
            return 0.0;
        return (h * h - l * l) / (2.0 * (w2_ - w1_) * (g2_ - g1_));
    }

    /// Interior points where the density has a kink.
    std::vector<double> breakpoints() const
    {
        std::vector<double> out;
        if (w1_ == w2_ || g1_ == g2_)
            return out;
        for (double b : {w1_ / g1_, w2_ / g2_})
        {
            if (b > lo() && b < hi())
                out.push_back(b);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

  private:
    double w1_, w2_, g2_, g1_;
};

/*!
 * log Pr(P G > x) = log E_beta[exp(-pi lambda (beta x)^(2/alpha))], by
 * adaptive Gauss-Kronrod quadrature over the density of beta. Works in log
 * space: with k = pi lambda x^gamma and t = k (beta^gamma - beta_min^gamma)
 * the integral becomes exp(-k beta_min^gamma) * int e^-t f(beta(t)) dbeta/dt dt.
 */
inline double lemma1_oracle_log(const SimParams& p, double x)
{
    if (x < 0.0)
        throw DomainError("link-power threshold must be non-negative");
    if (x == 0.0)
        return 0.0;
    const double gamma = 2.0 / p.alpha;
    const double k = std::numbers::pi * p.lambda * std::pow(x, gamma);
    const BetaLaw beta(p);
    const double b_lo_g = std::pow(beta.lo(), gamma);
    if (beta.is_point_mass())
        return -k * b_lo_g;

    auto beta_of = [&](double t) { return std::pow(b_lo_g + t / k, 1.0 / gamma); };
    auto integrand = [&](double t) {
        const double b = beta_of(t);
        return std::exp(-t) * beta.density(b) * std::pow(b, 1.0 - gamma) / (k * gamma);
    };

    constexpr double kTailCut = 60.0;
    const double t_end = std::min(k * (std::pow(beta.hi(), gamma) - b_lo_g), kTailCut);
    std::vector<double> cuts{0.0};
    for (double b : beta.breakpoints())
    {
        const double t = k * (std::pow(b, gamma) - b_lo_g);
        if (t < t_end)
            cuts.push_back(t);
    }
    cuts.push_back(t_end);

    using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    {
        double err = 0.0;
        const double piece = Quad::integrate(integrand, cuts[i], cuts[i + 1], 20, 1e-13, &err);
        if (!std::isfinite(piece) || err > 1e-8 * std::abs(piece) + 1e-15)
            throw NumericalError("link-power tail quadrature did not converge");
        total += piece;
    }
    if (!(total > 0.0))
        throw NumericalError("link-power tail quadrature returned a non-positive mass");
    return -k * b_lo_g + std::log(total);
}

/// Exact finite-x Pr(P G > x) under the model (quadrature).
inline double lemma1_oracle(const SimParams& p, double x) { return std::exp(lemma1_oracle_log(p, x)); }

/// Asymptotic bounds on -log Pr(truncated shot noise > x) for truncation
/// radius r; hi / lo = 2^alpha.
struct ExponentBand
{
    double lo = 0.0;
    double hi = 0.0;
};

inline ExponentBand corollary1_band(const SimParams& p, double r, double x)
{
    if (!(r > 0.0) || !(x > 0.0))
        throw DomainError("band requires positive radius and threshold");
    const double gamma = 2.0 / p.alpha;
    const double c = std::numbers::pi * p.lambda * std::pow(p.delta1 / p.delta, gamma);
    const double lo = c * std::pow(r, p.alpha * gamma) * std::pow(x, gamma);
    return {lo, std::pow(2.0, p.alpha) * lo};
}

//---------------------------------------------------------------------------//
// Distance laws
//---------------------------------------------------------------------------//

/// Pr(L >= tau) = exp(-pi lambda tau^2) for the nearest point of a PPP.
inline double nearest_distance_ccdf(double lambda, double tau)
{
    if (tau < 0.0)
        throw DomainError("distance must be non-negative");
    return std::exp(-std::numbers::pi * lambda * tau * tau);
}

/// Pr(D >= d) = (1 - d / (sqrt(nu) rho))^2 for the boundary distance of a
/// uniform point in the interior hexagon.
inline double boundary_distance_ccdf(double nu, double rho, double d)
{
    const double a = std::sqrt(nu) * rho;
    if (d < 0.0 || d > a)
        throw DomainError("boundary distance outside [0, sqrt(nu) rho]");
    const double s = 1.0 - d / a;
    return s * s;
}

//---------------------------------------------------------------------------//
// Exponent regression
//---------------------------------------------------------------------------//

struct FitPoint
{
    double k = 0.0;
    double p_hat = 0.0;
};

struct ExponentFit
{
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    /// slope / theoretical d psi / dK, when a constant was supplied.
    std::optional<double> ratio_to_theory;
};

/// Least squares of -log p_hat on K.
inline ExponentFit fit_exponent(std::span<const FitPoint> points,
                                std::optional<double> theory_per_k = std::nullopt)
{
    if (points.size() < 3)
        throw DomainError("exponent fit needs at least three points");
    const double n = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0;
    for (const FitPoint& pt : points)
    {
        if (!(pt.p_hat > 0.0 && pt.p_hat < 1.0))
            throw DomainError("exponent fit needs every p_hat strictly inside (0, 1)");
        sx += pt.k;
        sy += -std::log(pt.p_hat);
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const FitPoint& pt : points)
    {
        const double dx = pt.k - mx;
        const double dy = -std::log(pt.p_hat) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0))
        throw DomainError("exponent fit needs at least two distinct K values");

    ExponentFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (const FitPoint& pt : points)
    {
        const double e = -std::log(pt.p_hat) - (fit.intercept + fit.slope * pt.k);
        ss_res += e * e;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    if (theory_per_k && *theory_per_k != 0.0)
        fit.ratio_to_theory = fit.slope / *theory_per_k;
    return fit;
}

} // namespace coopnet

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace coopnet {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/*!
 * SplitMix64 stream generator. Satisfies UniformRandomBitGenerator so it
 * plugs into <random> distributions.
 *
 * The stream for a given state is
 *   state += 0x9e3779b97f4a7c15; return splitmix64_mix(state);
 */
class SplitMix64
{
  public:
    using result_type = std::uint64_t;

    constexpr explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    constexpr result_type operator()() noexcept
    {
        state_ += kGoldenGamma;
        return splitmix64_mix(state_);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept
    {
        return std::numeric_limits<result_type>::max();
    }

    constexpr std::uint64_t state() const noexcept { return state_; }

  private:
    std::uint64_t state_;
};

/*!
 * Counter-based seed derivation.
 *
 * seed(root, stream, index) =
 *   mix(mix(root ^ mix(stream + G)) + (index + 1) * G)
 * with mix = splitmix64_mix and G = 0x9e3779b97f4a7c15 (wrapping arithmetic).
 * Every (stream, index) pair gets its own generator, so trials can run in any
 * order on any number of workers.
 */
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream,
                                    std::uint64_t index) noexcept
{
    const std::uint64_t s = splitmix64_mix(root ^ splitmix64_mix(stream + kGoldenGamma));
    return splitmix64_mix(s + (index + 1) * kGoldenGamma);
}

inline SplitMix64 trial_rng(std::uint64_t root, std::uint64_t stream, std::uint64_t index) noexcept
{
    return SplitMix64(derive_seed(root, stream, index));
}

/// Uniform double on [0, 1) from the top 53 bits.
template <class Rng>
double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double on (0, 1]; safe as a log argument.
template <class Rng>
double uniform_open0(Rng& rng)
{
    return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

template <class Rng>
double uniform(Rng& rng, double lo, double hi)
{
    return lo + (hi - lo) * uniform01(rng);
}

/// Distance from a point to the nearest point of a PPP of density lambda:
/// Pr(L >= t) = exp(-pi lambda t^2), sampled by inversion.
template <class Rng>
double sample_nearest_distance(double lambda, Rng& rng)
{
    return std::sqrt(-std::log(uniform_open0(rng)) / (std::numbers::pi * lambda));
}

} // namespace coopnet

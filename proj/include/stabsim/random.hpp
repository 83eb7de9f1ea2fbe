/**
 * Seedable random streams and the base distributions used by the series.
 *
 * Stream derivation (bit-exact, all arithmetic modulo 2^64):
 *
 *   mix(z)  = z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
 *             z ^= z >> 27; z *= 0x94D049BB133111EB; z ^ (z >> 31)
 *   G       = 0x9E3779B97F4A7C15
 *   key0    = mix(seed ^ mix(substream_id + G))
 *   key1    = mix(key0 ^ 0xD1B54A32D192ED03)
 *   out(i)  = mix(mix(key0 + (i + 1) * G) ^ key1),   i = 0, 1, 2, ...
 *
 * out(i) is the i-th 64-bit word of the stream; the stream is counter based,
 * so its state is (key0, key1, i). A child stream is RandomStream(key1, id).
 *
 * Uniform variates are ((out >> 11) + 0.5) * 2^-53, strictly inside (0, 1).
 * Gaussian variates use Box-Muller on two consecutive uniforms u1, u2:
 * sqrt(-2 log u1) * cos(2 pi u2); the paired fill also emits the sine branch.
 */
#ifndef STABSIM_RANDOM_HPP
#define STABSIM_RANDOM_HPP

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "errors.hpp"

namespace stabsim {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Counter-based 64-bit generator addressed by (seed, substream_id).
class RandomStream {
public:
    using result_type = std::uint64_t;

    constexpr RandomStream(std::uint64_t seed, std::uint64_t substream_id) noexcept
        : seed_(seed), substream_(substream_id),
          key0_(detail::mix64(seed ^ detail::mix64(substream_id + detail::kGolden))),
          key1_(detail::mix64(key0_ ^ 0xD1B54A32D192ED03ULL)) {}

    constexpr std::uint64_t next_u64() noexcept {
        ++counter_;
        return detail::mix64(detail::mix64(key0_ + counter_ * detail::kGolden) ^ key1_);
    }

    constexpr result_type operator()() noexcept { return next_u64(); }
    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    /// Uniform on the open interval (0, 1).
    constexpr double uniform() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Independent stream keyed by this stream's identity; does not advance this one.
    [[nodiscard]] constexpr RandomStream child(std::uint64_t id) const noexcept {
        return RandomStream(key1_, id);
    }

    constexpr std::uint64_t seed() const noexcept { return seed_; }
    constexpr std::uint64_t substream_id() const noexcept { return substream_; }
    constexpr std::uint64_t counter() const noexcept { return counter_; }

    friend constexpr bool operator==(const RandomStream&, const RandomStream&) = default;

private:
    std::uint64_t seed_;
    std::uint64_t substream_;
    std::uint64_t key0_;
    std::uint64_t key1_;
    std::uint64_t counter_ = 0;
};

/// Anything that hands out uniforms on (0, 1). Tests substitute scripted sources.
template <class S>
concept UniformSource = requires(S& s) {
    { s.uniform() } -> std::convertible_to<double>;
};

template <UniformSource S>
double sample_exponential(S& stream) {
    return -std::log(static_cast<double>(stream.uniform()));
}

template <UniformSource S>
double sample_gaussian(S& stream) {
    const double u1 = stream.uniform();
    const double u2 = stream.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Fills `out` with standard normals, two per Box-Muller pair.
template <UniformSource S>
void fill_gaussian(std::span<double> out, S& stream) {
    std::size_t i = 0;
    for (; i + 1 < out.size(); i += 2) {
        const double r = std::sqrt(-2.0 * std::log(static_cast<double>(stream.uniform())));
        const double theta = 2.0 * std::numbers::pi * stream.uniform();
        out[i] = r * std::cos(theta);
        out[i + 1] = r * std::sin(theta);
    }
    if (i < out.size()) out[i] = sample_gaussian(stream);
}

/// Laplace(0, 1/2): density exp(-2|x|), by inversion of one uniform.
template <UniformSource S>
double sample_laplace_half(S& stream) {
    const double u = stream.uniform();
    return u < 0.5 ? 0.5 * std::log(2.0 * u) : -0.5 * std::log(2.0 * (1.0 - u));
}

inline double laplace_half_density(double x) { return std::exp(-2.0 * std::abs(x)); }

template <UniformSource S>
double sample_rademacher(S& stream) {
    return stream.uniform() < 0.5 ? -1.0 : 1.0;
}

/// Arrival times of a unit-rate Poisson process, strictly increasing, first > 0.
class ArrivalSequence {
public:
    explicit ArrivalSequence(std::vector<double> gammas) : gammas_(std::move(gammas)) {
        if (gammas_.empty()) throw DomainError("arrival sequence is empty");
        if (!(gammas_.front() > 0.0)) throw DomainError("first arrival must be positive");
        for (std::size_t i = 1; i < gammas_.size(); ++i)
            if (!(gammas_[i] > gammas_[i - 1]))
                throw DomainError("arrival times must be strictly increasing");
    }

    std::size_t size() const noexcept { return gammas_.size(); }
    double operator[](std::size_t i) const noexcept { return gammas_[i]; }
    std::span<const double> values() const noexcept { return gammas_; }
    auto begin() const noexcept { return gammas_.begin(); }
    auto end() const noexcept { return gammas_.end(); }

private:
    std::vector<double> gammas_;
};

/// Next arrival after `previous`. A zero-length gap from rounding is bumped
/// to the next representable double so the sequence stays strictly increasing.
template <UniformSource S>
double next_arrival(double previous, S& stream) {
    const double next = previous + sample_exponential(stream);
    return next > previous ? next : std::nextafter(previous, std::numeric_limits<double>::infinity());
}

template <UniformSource S>
ArrivalSequence poisson_arrivals(std::size_t count, S& stream) {
    if (count == 0) throw DomainError("poisson_arrivals: count must be at least 1");
    std::vector<double> gammas(count);
    double gamma = 0.0;
    for (auto& g : gammas) {
        gamma = next_arrival(gamma, stream);
        g = gamma;
    }
    return ArrivalSequence(std::move(gammas));
}

} // namespace stabsim

#endif // STABSIM_RANDOM_HPP

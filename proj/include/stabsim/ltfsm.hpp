/**
 * Local time fractional stable motion (LTFSM) by truncated shot-noise series:
 *
 *   Z(t) = sum_{n <= P} Gamma_n^(-1/alpha) G_n phi(X_n)^(-1/alpha) I_{n,k}(X_n, t)
 *
 * where G_n is standard normal, X_n has density phi (Laplace(0, 1/2) by
 * default, so phi(x)^(-1/alpha) = exp(2|x|/alpha)), and I_{n,k} is the
 * discretised mollified occupation integral of an independent fBm path with
 * m_{n,k} steps.
 *
 * Parameter tuning for a target accuracy epsilon:
 *
 *   P = ceil(C_P eps^(-2 eta alpha / (2 - alpha))), at least N + 1
 *   k = ceil(C_k eps^(-eta / delta))
 *   N = smallest integer with (N + 1) alpha > q
 *   m_{n,k} = floor(Gamma_n^(-1/(delta' alpha)) k^((2 + delta)/delta'))   n <= N
 *   m_{n,k} = floor(k^((2 + delta)/delta') n^(-beta/delta'))               n > N
 *
 * with every m clamped to [1, max_points].
 *
 * Constraints: 0 < alpha < 2, 0 < H < 1, eta > 1, p >= 1, q > max(p, 2),
 * 0 < delta < 1/(2H) - 1/2, 0 < delta' < H, beta < 1/alpha - 1/2.
 * The bound delta' < H is the fBm Holder regularity; a looser reading
 * delta' < 1/H also appears in the literature and is not what is enforced.
 * For the Laplace density, int phi^(1 - q/alpha) exp(-a x^2) dx is finite
 * for every q and a > 0, so the moment condition needs no runtime check.
 */
#ifndef STABSIM_LTFSM_HPP
#define STABSIM_LTFSM_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fbm.hpp"
#include "local_time.hpp"
#include "random.hpp"
#include "shot_noise.hpp"
#include "stable_oracle.hpp"

namespace stabsim {

struct SeriesConfig {
    double alpha = 1.0;
    double hurst = 0.5;
    double horizon = 1.0;
    std::size_t grid_points = 100;
    double epsilon = 0.5;
    double eta = 1.5;
    double q = 2.5;
    double p = 2.0;
    double delta = 0.2;
    double delta_prime = 0.25;
    double beta = 0.1;
    double c_p = 1.0;
    double c_k = 1.0;
    std::size_t max_points = 65536;

    double delta_upper_bound() const { return 1.0 / (2.0 * hurst) - 0.5; }
    double delta_prime_upper_bound() const { return hurst; }
    double beta_upper_bound() const { return 1.0 / alpha - 0.5; }

    /// Throws ConfigError naming the first violated constraint.
    void validate() const {
        auto fail = [](const std::string& constraint, double value, double bound) {
            std::ostringstream os;
            os << "constraint violated: " << constraint << " (value " << value << ", bound " << bound << ")";
            throw ConfigError(os.str());
        };
        if (!(alpha > 0.0)) fail("alpha > 0", alpha, 0.0);
        if (!(alpha < 2.0)) fail("alpha < 2", alpha, 2.0);
        if (!(hurst > 0.0)) fail("hurst > 0", hurst, 0.0);
        if (!(hurst < 1.0)) fail("hurst < 1", hurst, 1.0);
        if (!(horizon > 0.0)) fail("T > 0", horizon, 0.0);
        if (grid_points < 1) fail("grid >= 1", static_cast<double>(grid_points), 1.0);
        if (!(epsilon > 0.0)) fail("epsilon > 0", epsilon, 0.0);
        if (!(eta > 1.0)) fail("eta > 1", eta, 1.0);
        if (!(p >= 1.0)) fail("p >= 1", p, 1.0);
        if (!(q > std::max(p, 2.0))) fail("q > max(p, 2)", q, std::max(p, 2.0));
        if (!(delta > 0.0)) fail("delta > 0", delta, 0.0);
        if (!(delta < delta_upper_bound())) fail("delta < 1/(2H) - 1/2", delta, delta_upper_bound());
        if (!(delta_prime > 0.0)) fail("delta_prime > 0", delta_prime, 0.0);
        if (!(delta_prime < delta_prime_upper_bound())) fail("delta_prime < H", delta_prime, hurst);
        if (!(beta < beta_upper_bound())) fail("beta < 1/alpha - 1/2", beta, beta_upper_bound());
        if (!(c_p > 0.0)) fail("C_P > 0", c_p, 0.0);
        if (!(c_k > 0.0)) fail("C_k > 0", c_k, 0.0);
        if (max_points < 1) fail("max_points >= 1", static_cast<double>(max_points), 1.0);
    }
};

struct TuningParams {
    std::size_t P = 1;
    std::size_t N = 1;
    long k = 1;
    double log_base_points = 0.0;  ///< log k^((2 + delta)/delta')
    double head_gamma_exponent = 0.0; ///< -1/(delta' alpha)
    double tail_n_exponent = 0.0;  ///< -beta/delta'
    std::size_t max_points = 65536;

    std::size_t head_m(double gamma) const { return clamp_points(log_base_points + head_gamma_exponent * std::log(gamma)); }
    std::size_t tail_m(std::size_t n) const {
        return clamp_points(log_base_points + tail_n_exponent * std::log(static_cast<double>(n)));
    }
    std::size_t points_for(std::size_t n, double gamma) const { return n <= N ? head_m(gamma) : tail_m(n); }

    /// True when the rule asks for more than max_points.
    bool capped(std::size_t n, double gamma) const {
        const double lg = n <= N ? log_base_points + head_gamma_exponent * std::log(gamma)
                                 : log_base_points + tail_n_exponent * std::log(static_cast<double>(n));
        return lg >= std::log(static_cast<double>(max_points) + 1.0);
    }

private:
    std::size_t clamp_points(double log_m) const {
        if (log_m >= std::log(static_cast<double>(max_points) + 1.0)) return max_points;
        const double m = std::floor(std::exp(log_m));
        return m < 1.0 ? 1 : std::min(max_points, static_cast<std::size_t>(m));
    }
};

/// Unrounded C_P eps^(-2 eta alpha / (2 - alpha)).
inline double truncation_formula(const SeriesConfig& c) {
    return c.c_p * std::pow(c.epsilon, -2.0 * c.eta * c.alpha / (2.0 - c.alpha));
}

/// Unrounded C_k eps^(-eta / delta).
inline double bandwidth_formula(const SeriesConfig& c) { return c.c_k * std::pow(c.epsilon, -c.eta / c.delta); }

inline std::size_t crossover_index(double q, double alpha) {
    std::size_t n = 0;
    while (static_cast<double>(n + 1) * alpha <= q) ++n;
    return n;
}

inline TuningParams tune(const SeriesConfig& config) {
    config.validate();
    constexpr double kLimit = 1e9;
    const double p_raw = truncation_formula(config);
    const double k_raw = bandwidth_formula(config);
    if (!(p_raw <= kLimit)) throw ConfigError("truncation length " + std::to_string(p_raw) + " exceeds 1e9");
    if (!(k_raw <= kLimit)) throw ConfigError("bandwidth index " + std::to_string(k_raw) + " exceeds 1e9");

    TuningParams t;
    t.N = crossover_index(config.q, config.alpha);
    t.P = std::max(static_cast<std::size_t>(std::ceil(p_raw)), t.N + 1);
    t.k = std::max(1L, static_cast<long>(std::ceil(k_raw)));
    t.log_base_points = (2.0 + config.delta) / config.delta_prime * std::log(static_cast<double>(t.k));
    t.head_gamma_exponent = -1.0 / (config.delta_prime * config.alpha);
    t.tail_n_exponent = -config.beta / config.delta_prime;
    t.max_points = config.max_points;
    return t;
}

struct SamplePath {
    std::vector<double> times;
    std::vector<double> values;
};

/// grid_points + 1 times j T / grid_points, the last one exactly T.
inline std::vector<double> uniform_grid(double horizon, std::size_t grid_points) {
    std::vector<double> t(grid_points + 1);
    for (std::size_t j = 0; j <= grid_points; ++j)
        t[j] = horizon * static_cast<double>(j) / static_cast<double>(grid_points);
    t.back() = horizon;
    return t;
}

/// Density of the location variables X_n.
enum class LocationDensity { laplace, gaussian };

/// phi(x)^(-1/alpha) for the chosen density.
inline double importance_weight(LocationDensity density, double x, double alpha) {
    if (density == LocationDensity::laplace) return std::exp(2.0 * std::abs(x) / alpha);
    return std::exp((x * x + std::log(2.0 * std::numbers::pi)) / (2.0 * alpha));
}

/// Everything random about one term except its fBm path, which is
/// regenerated on demand from `path_stream`.
struct TermDraw {
    std::size_t index = 0;
    double gamma = 0.0;
    double gaussian = 0.0;
    double location = 0.0;
    std::size_t points = 1;
    RandomStream path_stream{0, 0};
};

/// Per-term draw order on the term stream: G_n, then X_n, then the fBm path.
inline TermDraw draw_term(std::size_t n, double gamma, RandomStream& term_stream, const TuningParams& params,
                          LocationDensity density) {
    TermDraw d;
    d.index = n;
    d.gamma = gamma;
    d.gaussian = sample_gaussian(term_stream);
    d.location = density == LocationDensity::laplace ? sample_laplace_half(term_stream) : sample_gaussian(term_stream);
    d.points = params.points_for(n, gamma);
    d.path_stream = term_stream;
    return d;
}

/// Arrivals from stream.child(0), term n from stream.child(n), as in simulate_series.
inline std::vector<TermDraw> draw_terms(const TuningParams& params, const RandomStream& stream,
                                        LocationDensity density = LocationDensity::laplace) {
    std::vector<TermDraw> draws;
    draws.reserve(params.P);
    RandomStream arrivals = stream.child(0);
    double gamma = 0.0;
    for (std::size_t n = 1; n <= params.P; ++n) {
        gamma = next_arrival(gamma, arrivals);
        RandomStream term_stream = stream.child(n);
        draws.push_back(draw_term(n, gamma, term_stream, params, density));
    }
    return draws;
}

/// Default path source: a fresh fBm path from the draw's own stream.
struct FreshFbmPath {
    double hurst;
    double horizon;
    FbmPath operator()(const TermDraw& d) const {
        RandomStream s = d.path_stream;
        return fbm_path(hurst, horizon, d.points, s);
    }
};

/// The term's series entry: weight G_n, inner curve phi(X_n)^(-1/alpha) I_{n,k}(X_n, .),
/// with the value at t = 0 set to exactly 0.
template <class PathSource>
SeriesTerm term_from_draw(const TermDraw& d, const SeriesConfig& config, const TuningParams& params,
                          LocationDensity density, std::span<const double> grid, PathSource&& source) {
    const FbmPath path = source(d);
    OccupationCurve occ = discretized_occupation(path, KernelBandwidth(params.k), d.location, grid);
    const double w = importance_weight(density, d.location, config.alpha);
    SeriesTerm term{d.gamma, d.gaussian, d.location, std::move(occ.values)};
    for (std::size_t j = 0; j < grid.size(); ++j) term.inner_curve[j] = grid[j] == 0.0 ? 0.0 : w * term.inner_curve[j];
    return term;
}

/// Sums the given draws in order.
template <class PathSource>
SamplePath assemble(const SeriesConfig& config, const TuningParams& params, std::span<const TermDraw> draws,
                    LocationDensity density, PathSource&& source) {
    SamplePath out{uniform_grid(config.horizon, config.grid_points), {}};
    out.values.assign(out.times.size(), 0.0);
    for (const auto& d : draws) {
        const SeriesTerm term = term_from_draw(d, config, params, density, out.times, source);
        detail::accumulate_term(out.values, term.gamma, config.alpha, term.weight, term.inner_curve);
    }
    return out;
}

inline SamplePath assemble(const SeriesConfig& config, const TuningParams& params, std::span<const TermDraw> draws,
                           LocationDensity density = LocationDensity::laplace) {
    return assemble(config, params, draws, density, FreshFbmPath{config.hurst, config.horizon});
}

inline SamplePath simulate_ltfsm(const SeriesConfig& config, const TuningParams& params, const RandomStream& stream,
                                 LocationDensity density = LocationDensity::laplace) {
    config.validate();
    SamplePath out{uniform_grid(config.horizon, config.grid_points), {}};
    const FreshFbmPath source{config.hurst, config.horizon};
    out.values = simulate_series(params.P, config.alpha, out.times.size(), stream,
                                 [&](std::size_t n, double gamma, RandomStream& term_stream) {
                                     const TermDraw d = draw_term(n, gamma, term_stream, params, density);
                                     return term_from_draw(d, config, params, density, out.times, source);
                                 });
    return out;
}

/// Same process with standard normal locations and weight (2 pi)^(1/(2 alpha)) exp(X^2/(2 alpha)).
inline SamplePath simulate_ltfsm_gaussian_density(const SeriesConfig& config, const TuningParams& params,
                                                  const RandomStream& stream) {
    return simulate_ltfsm(config, params, stream, LocationDensity::gaussian);
}

// ---------------------------------------------------------------------------
// Random walk with random rewards (H = 1/2 only)

/**
 * Z(t) = steps^-(1/2 + 1/(2 alpha)) * sum_{j = 1}^{floor(steps t / T)} xi(S_j)
 * for a simple symmetric walk S (S_0 = 0, signs from stream.child(0)) and
 * i.i.d. site rewards xi(x) supplied by `reward(x)`.
 */
template <class RewardFn>
SamplePath simulate_rwrr_baseline(double alpha, std::size_t steps, double horizon, std::size_t grid_points,
                                  const RandomStream& stream, RewardFn&& reward) {
    detail::check_series_alpha(alpha);
    if (steps < 1) throw DomainError("random walk needs at least one step");
    if (!(horizon > 0.0)) throw DomainError("random walk: horizon must be positive");
    SamplePath out{uniform_grid(horizon, grid_points), {}};
    out.values.assign(out.times.size(), 0.0);

    const double norm = std::pow(static_cast<double>(steps), 0.5 + 0.5 / alpha);
    RandomStream walk = stream.child(0);
    long position = 0;
    double sum = 0.0;
    std::size_t j = 0;
    for (std::size_t g = 0; g < out.times.size(); ++g) {
        const std::size_t last = last_node_index(out.times[g], horizon, steps);
        for (; j < last; ++j) {
            position += sample_rademacher(walk) > 0.0 ? 1 : -1;
            sum += reward(position);
        }
        out.values[g] = sum / norm;
    }
    return out;
}

/// Rewards from the stable oracle; site x uses stream.child(1).child(zigzag(x)),
/// so a reward does not depend on when the site is first visited.
class StableSiteRewards {
public:
    StableSiteRewards(double alpha, std::size_t steps, const RandomStream& stream)
        : alpha_(alpha), sites_(stream.child(1)), offset_(static_cast<long>(steps)),
          cache_(2 * steps + 1, std::numeric_limits<double>::quiet_NaN()) {}

    double operator()(long site) {
        double& slot = cache_[static_cast<std::size_t>(site + offset_)];
        if (std::isnan(slot)) {
            const auto zigzag = site >= 0 ? 2 * static_cast<std::uint64_t>(site)
                                          : 2 * static_cast<std::uint64_t>(-site) - 1;
            RandomStream s = sites_.child(zigzag);
            slot = oracle::sample_stable(alpha_, s);
        }
        return slot;
    }

private:
    double alpha_;
    RandomStream sites_;
    long offset_;
    std::vector<double> cache_;
};

inline SamplePath simulate_rwrr_baseline(double alpha, std::size_t steps, double horizon, std::size_t grid_points,
                                         const RandomStream& stream) {
    StableSiteRewards rewards(alpha, steps, stream);
    return simulate_rwrr_baseline(alpha, steps, horizon, grid_points, stream, rewards);
}

} // namespace stabsim

#endif // STABSIM_LTFSM_HPP

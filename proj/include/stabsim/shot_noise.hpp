/**
 * Truncated shot-noise (LePage) series sum_n h(Gamma_n, V_n) with
 * h(r, v) = r^(-1/alpha) v, and the moment bounds that control the
 * truncation and inner-approximation errors.
 *
 * Bound constants (q >= 2, 0 < alpha < 2):
 *
 *   B_q     = sqrt(2) (Gamma((q + 1)/2) / sqrt(pi))^(1/q), B_2 = 1
 *   H_{n,q} = Gamma(n - q/alpha) n^(q/alpha) / Gamma(n)
 *   A_q     = 2 B_q^q M_q (alpha / (2 - alpha))^(q/2)
 *   A'_q    = B_q^q (alpha / (2 - alpha beta - alpha))^(q/2)
 *
 *   E|Y(t) - Y_N(t)|^q  <= A_q H_{N+1,q} / N^(q (2 - alpha) / (2 alpha))
 *   E|sum_{N<n<=P} h(Gamma_n, V_n) - h(Gamma_n, W_n)|^q
 *                       <= A'_q H_{N+1,q} M_{q,k} (N^-e - P^-e)^(q/2),  e = 2/alpha - beta - 1
 *
 * The L^p(K) versions multiply by Vol(K)^(q/p) (the truncation one uses
 * H_{N,q}). M_q and M_{q,k} are always supplied by the caller.
 */
#ifndef STABSIM_SHOT_NOISE_HPP
#define STABSIM_SHOT_NOISE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "random.hpp"

namespace stabsim {

namespace detail {

inline void check_series_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw DomainError("series requires 0 < alpha < 2, got " + std::to_string(alpha));
}

/// acc += r^(-1/alpha) * (weight * inner), the single accumulation rule used
/// everywhere a term is added so that equal term orders give equal bits.
inline void accumulate_term(std::span<double> acc, double gamma, double alpha, double weight,
                            std::span<const double> inner) {
    const double scale = std::pow(gamma, -1.0 / alpha);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += scale * (weight * inner[i]);
}

} // namespace detail

inline std::vector<double> h_map(double gamma, double alpha, std::span<const double> inner) {
    if (!(gamma > 0.0)) throw DomainError("h_map: gamma must be positive");
    const double scale = std::pow(gamma, -1.0 / alpha);
    std::vector<double> out(inner.size());
    std::transform(inner.begin(), inner.end(), out.begin(), [scale](double v) { return scale * v; });
    return out;
}

struct SeriesTerm {
    double gamma = 1.0;
    double weight = 1.0;
    double location = 0.0;
    std::vector<double> inner_curve;
};

/// Sum of the terms in increasing-gamma order (ties keep their input order).
inline std::vector<double> sum_series(std::span<const SeriesTerm> terms, double alpha) {
    if (terms.empty()) throw DomainError("sum_series: no terms");
    const std::size_t len = terms.front().inner_curve.size();
    std::vector<std::size_t> order(terms.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (const auto& term : terms) {
        if (term.inner_curve.size() != len) throw ShapeError("sum_series: terms are on different grids");
        if (!(term.gamma > 0.0)) throw DomainError("sum_series: gamma must be positive");
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return terms[a].gamma < terms[b].gamma; });
    std::vector<double> acc(len, 0.0);
    for (std::size_t i : order)
        detail::accumulate_term(acc, terms[i].gamma, alpha, terms[i].weight, terms[i].inner_curve);
    return acc;
}

/**
 * Generic truncated series engine. Arrivals come from `stream.child(0)` and
 * term n (1-based) gets `stream.child(n)`. The generator is called as
 * `gen(n, gamma, term_stream)` and returns the SeriesTerm for that index; the
 * engine adds terms in index (hence increasing-gamma) order.
 */
template <class Generator>
std::vector<double> simulate_series(std::size_t terms, double alpha, std::size_t grid_size,
                                    const RandomStream& stream, Generator&& gen) {
    detail::check_series_alpha(alpha);
    if (terms == 0) throw DomainError("simulate_series: need at least one term");
    RandomStream arrivals = stream.child(0);
    std::vector<double> acc(grid_size, 0.0);
    double gamma = 0.0;
    for (std::size_t n = 1; n <= terms; ++n) {
        gamma = next_arrival(gamma, arrivals);
        RandomStream term_stream = stream.child(n);
        const SeriesTerm term = gen(n, gamma, term_stream);
        if (term.inner_curve.size() != grid_size) throw ShapeError("simulate_series: generator returned wrong grid");
        detail::accumulate_term(acc, gamma, alpha, term.weight, term.inner_curve);
    }
    return acc;
}

/// Partial sums Y_N = sum_{n <= N} Gamma_n^(-1/alpha) eps_n of the classical
/// LePage series with Rademacher signs, at each checkpoint N (ascending).
/// Per term the stream yields one exponential gap, then one sign.
template <UniformSource S>
std::vector<double> lepage_partial_sums(double alpha, std::span<const std::size_t> checkpoints, S& stream) {
    detail::check_series_alpha(alpha);
    if (checkpoints.empty()) throw DomainError("lepage_partial_sums: no checkpoints");
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) || checkpoints.front() == 0)
        throw DomainError("lepage_partial_sums: checkpoints must be positive and ascending");
    std::vector<double> out;
    out.reserve(checkpoints.size());
    const double exponent = -1.0 / alpha;
    double gamma = 0.0;
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t target : checkpoints) {
        for (; n < target; ++n) {
            gamma = next_arrival(gamma, stream);
            sum += std::pow(gamma, exponent) * sample_rademacher(stream);
        }
        out.push_back(sum);
    }
    return out;
}

/// Scale sigma of the SaS limit of sum Gamma_n^(-1/alpha) eps_n:
/// sigma^alpha = 1 / C_alpha with C_alpha = (1 - alpha) / (Gamma(2 - alpha) cos(pi alpha / 2)),
/// C_1 = 2 / pi.
inline double lepage_stable_scale(double alpha) {
    detail::check_series_alpha(alpha);
    const double c = alpha == 1.0 ? 2.0 / std::numbers::pi
                                  : (1.0 - alpha) / (std::tgamma(2.0 - alpha) * std::cos(std::numbers::pi * alpha / 2.0));
    return std::pow(1.0 / c, 1.0 / alpha);
}

// ---------------------------------------------------------------------------
// Bounds

inline double bound_B_q(double q) {
    if (!(q >= 2.0)) throw DomainError("B_q requires q >= 2, got " + std::to_string(q));
    if (q == 2.0) return 1.0;
    const double log_ratio = std::lgamma((q + 1.0) / 2.0) - 0.5 * std::log(std::numbers::pi);
    return std::numbers::sqrt2 * std::exp(log_ratio / q);
}

inline double bound_H_nq(double n, double q, double alpha) {
    detail::check_series_alpha(alpha);
    const double r = q / alpha;
    if (!(n > r))
        throw DomainError("H_{n,q} requires n > q/alpha (n = " + std::to_string(n) +
                          ", q/alpha = " + std::to_string(r) + ")");
    return std::exp(std::lgamma(n - r) - std::lgamma(n) + r * std::log(n));
}

/// Smallest n0 > q/alpha with |H_{n,q} - 1| < tol for every n >= n0
/// (H_{n,q} decreases to 1, so the first crossing suffices).
inline std::size_t h_nq_threshold(double q, double alpha, double tol) {
    auto n = static_cast<std::size_t>(std::floor(q / alpha)) + 1;
    while (std::abs(bound_H_nq(static_cast<double>(n), q, alpha) - 1.0) >= tol) ++n;
    return n;
}

inline double bound_A_q(double q, double alpha, double m_q) {
    detail::check_series_alpha(alpha);
    return 2.0 * std::pow(bound_B_q(q), q) * m_q * std::pow(alpha / (2.0 - alpha), q / 2.0);
}

inline double bound_A_prime_q(double q, double alpha, double beta) {
    detail::check_series_alpha(alpha);
    if (!(beta < 1.0 / alpha - 0.5))
        throw DomainError("beta < 1/alpha - 1/2 violated (beta = " + std::to_string(beta) + ")");
    return std::pow(bound_B_q(q), q) * std::pow(alpha / (2.0 - alpha * beta - alpha), q / 2.0);
}

inline double truncation_bound(std::size_t N, double q, double alpha, double m_q) {
    detail::check_series_alpha(alpha);
    if (!(q >= 2.0)) throw DomainError("truncation bound requires q >= 2");
    const auto n = static_cast<double>(N);
    if (!(n > q / alpha - 1.0)) throw DomainError("truncation bound requires N > q/alpha - 1");
    return bound_A_q(q, alpha, m_q) * bound_H_nq(n + 1.0, q, alpha) /
           std::pow(n, q * (2.0 - alpha) / (2.0 * alpha));
}

inline double truncation_bound_lp(std::size_t N, double q, double alpha, double m_q, double p, double vol_k) {
    detail::check_series_alpha(alpha);
    const auto n = static_cast<double>(N);
    if (!(p > 0.0)) throw DomainError("L^p bound requires p > 0");
    if (!(vol_k > 0.0)) throw DomainError("L^p bound requires Vol(K) > 0");
    if (!(q > std::max(p, 2.0))) throw DomainError("L^p bound requires q > max(p, 2)");
    if (!((n + 1.0) * alpha > q)) throw DomainError("L^p bound requires (N + 1) alpha > q");
    return std::pow(vol_k, q / p) * bound_A_q(q, alpha, m_q) * bound_H_nq(n, q, alpha) /
           std::pow(n, q * (2.0 - alpha) / (2.0 * alpha));
}

/// P == N is accepted as the empty block and yields 0.
inline double approximation_bound(std::size_t N, std::size_t P, double q, double alpha, double beta, double m_qk) {
    detail::check_series_alpha(alpha);
    if (!(q >= 2.0)) throw DomainError("approximation bound requires q >= 2");
    const auto n = static_cast<double>(N);
    const auto p = static_cast<double>(P);
    if (!(alpha * (n + 1.0) > q)) throw DomainError("approximation bound requires alpha (N + 1) > q");
    if (P < N) throw DomainError("approximation bound requires P >= N");
    const double a_prime = bound_A_prime_q(q, alpha, beta);
    const double e = 2.0 / alpha - beta - 1.0;
    const double gap = std::pow(n, -e) - std::pow(p, -e);
    return a_prime * bound_H_nq(n + 1.0, q, alpha) * m_qk * std::pow(gap, q / 2.0);
}

inline double approximation_bound_lp(std::size_t N, std::size_t P, double q, double alpha, double beta,
                                     double m_qk, double p, double vol_k) {
    if (!(p > 0.0)) throw DomainError("L^p bound requires p > 0");
    if (!(vol_k > 0.0)) throw DomainError("L^p bound requires Vol(K) > 0");
    if (!(q > std::max(p, 2.0))) throw DomainError("L^p bound requires q > max(p, 2)");
    return std::pow(vol_k, q / p) * approximation_bound(N, P, q, alpha, beta, m_qk);
}

struct BoundInputs {
    double alpha = 1.0;
    double q = 2.0;
    std::size_t N = 1;
    double M_q = 1.0;
    std::optional<std::size_t> P;
    std::optional<double> beta;
    double M_qk = 1.0;
    std::optional<double> p;
    double vol_K = 1.0;
};

struct BoundReport {
    double q = 0.0;
    double alpha = 0.0;
    std::size_t N = 0;
    double B_q = 0.0;
    double H_Nplus1_q = 0.0;
    double A_q = 0.0;
    double M_q = 0.0;
    double truncation_bound = 0.0;
    std::optional<double> A_prime_q;
    std::optional<double> M_qk;
    std::optional<double> approximation_bound;
    std::optional<double> truncation_bound_lp;
    std::optional<double> approximation_bound_lp;
};

/// Evaluates every bound the inputs determine. The approximation bound needs
/// P and beta; the L^p variants additionally need p.
inline BoundReport make_bound_report(const BoundInputs& in) {
    if (!(in.q >= 2.0)) throw DomainError("q >= 2 required, got " + std::to_string(in.q));
    if (!(static_cast<double>(in.N) > in.q / in.alpha - 1.0))
        throw DomainError("N > q/alpha - 1 required (N = " + std::to_string(in.N) +
                          ", q/alpha - 1 = " + std::to_string(in.q / in.alpha - 1.0) + ")");
    BoundReport r;
    r.q = in.q;
    r.alpha = in.alpha;
    r.N = in.N;
    r.B_q = bound_B_q(in.q);
    r.H_Nplus1_q = bound_H_nq(static_cast<double>(in.N) + 1.0, in.q, in.alpha);
    r.A_q = bound_A_q(in.q, in.alpha, in.M_q);
    r.M_q = in.M_q;
    r.truncation_bound = truncation_bound(in.N, in.q, in.alpha, in.M_q);
    if (in.p) r.truncation_bound_lp = truncation_bound_lp(in.N, in.q, in.alpha, in.M_q, *in.p, in.vol_K);
    if (in.P && in.beta) {
        r.A_prime_q = bound_A_prime_q(in.q, in.alpha, *in.beta);
        r.M_qk = in.M_qk;
        r.approximation_bound = approximation_bound(in.N, *in.P, in.q, in.alpha, *in.beta, in.M_qk);
        if (in.p)
            r.approximation_bound_lp =
                approximation_bound_lp(in.N, *in.P, in.q, in.alpha, *in.beta, in.M_qk, *in.p, in.vol_K);
    }
    return r;
}

} // namespace stabsim

#endif // STABSIM_SHOT_NOISE_HPP

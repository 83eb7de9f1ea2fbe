/**
 * Mollified occupation integrals of fBm paths.
 *
 * The triangle kernel phi(x) = max(0, 1 - |x|) and its rescaling
 * phi_k(x) = k phi(k x) form an approximate identity supported on [-1/k, 1/k].
 * The occupation integral int_0^t phi_k(B_s - x) ds is discretised by the
 * left-point rectangle rule on the path's own grid,
 *
 *   I(x, t) = (T / m) * sum_{i = 0}^{floor(m t / T)} phi_k(B_{i T / m} - x),
 *
 * with weight T/m so that I converges to the integral for any horizon T.
 * The i = 0 summand is kept, which biases I by at most k T / m.
 */
#ifndef STABSIM_LOCAL_TIME_HPP
#define STABSIM_LOCAL_TIME_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fbm.hpp"

namespace stabsim {

class KernelBandwidth {
public:
    explicit KernelBandwidth(long k) : k_(k) {
        if (k < 1) throw DomainError("kernel bandwidth index must be >= 1, got " + std::to_string(k));
    }
    long value() const noexcept { return k_; }
    double support() const noexcept { return 1.0 / static_cast<double>(k_); }

private:
    long k_;
};

inline double kernel_phi(double x) { return std::max(0.0, 1.0 - std::abs(x)); }

inline double kernel_phi_k(KernelBandwidth k, double x) {
    const auto kk = static_cast<double>(k.value());
    return kk * kernel_phi(kk * x);
}

struct OccupationCurve {
    double center = 0.0;
    std::vector<double> times;
    std::vector<double> values;
};

/// Index of the last rectangle-rule node at or before t. The small relative
/// slack absorbs rounding when t is itself a grid node.
inline std::size_t last_node_index(double t, double horizon, std::size_t m) {
    const double pos = static_cast<double>(m) * t / horizon;
    const auto idx = static_cast<std::size_t>(std::floor(pos + 1e-9 * std::max(1.0, pos)));
    return std::min(idx, m);
}

namespace detail {

inline void check_eval_times(std::span<const double> eval_times, double horizon) {
    const double slack = 1e-12 * horizon;
    for (std::size_t j = 0; j < eval_times.size(); ++j) {
        if (eval_times[j] < -slack || eval_times[j] > horizon + slack)
            throw DomainError("evaluation time outside [0, T]");
        if (j > 0 && eval_times[j] < eval_times[j - 1])
            throw DomainError("evaluation times must be nondecreasing");
    }
}

} // namespace detail

inline OccupationCurve discretized_occupation(const FbmPath& path, KernelBandwidth k, double x,
                                              std::span<const double> eval_times) {
    const std::size_t m = path.points();
    if (m == 0) throw DomainError("discretized_occupation: path has no steps");
    detail::check_eval_times(eval_times, path.horizon);

    OccupationCurve curve{x, {eval_times.begin(), eval_times.end()}, std::vector<double>(eval_times.size())};
    const double weight = path.horizon / static_cast<double>(m);
    const double lo = x - k.support();
    const double hi = x + k.support();

    double sum = 0.0;
    std::size_t next = 0; // next path node to add
    for (std::size_t j = 0; j < eval_times.size(); ++j) {
        const std::size_t last = last_node_index(eval_times[j], path.horizon, m);
        for (; next <= last; ++next) {
            const double b = path.values[next];
            if (b > lo && b < hi) sum += kernel_phi_k(k, b - x);
        }
        curve.values[j] = weight * sum;
    }
    return curve;
}

/// Time spent by the sampled path in [x - w/2, x + w/2] up to t (grid nodes
/// i <= floor(m t / T), each carrying T/m).
inline double occupation_measure(const FbmPath& path, double bin_width, double x, double t) {
    if (!(bin_width > 0.0)) throw DomainError("occupation: bin width must be positive");
    const std::size_t m = path.points();
    const std::size_t last = last_node_index(t, path.horizon, m);
    std::size_t count = 0;
    for (std::size_t i = 0; i <= last; ++i)
        if (std::abs(path.values[i] - x) <= 0.5 * bin_width) ++count;
    return path.horizon / static_cast<double>(m) * static_cast<double>(count);
}

/// Histogram estimate of the local time at level x: occupation measure / w.
inline double occupation_oracle(const FbmPath& path, double bin_width, double x, double t) {
    return occupation_measure(path, bin_width, x, t) / bin_width;
}

} // namespace stabsim

#endif // STABSIM_LOCAL_TIME_HPP

/**
 * Fractional Brownian motion on the closed uniform grid {i T / m : i = 0..m}.
 *
 * The generator is exact in distribution. Fractional Gaussian noise of length
 * M = bit_ceil(m) is drawn by circulant embedding (Davies-Harte) of size 2M,
 * the first m increments are scaled by (T/m)^H and cumulated. If the
 * embedding has a negative eigenvalue the automatic method falls back to a
 * dense Cholesky factor of the path covariance. At H = 1/2 the increments are
 * independent and are drawn directly.
 */
#ifndef STABSIM_FBM_HPP
#define STABSIM_FBM_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <fftw3.h>

#include "errors.hpp"
#include "random.hpp"

namespace stabsim {

struct FbmPath {
    double hurst = 0.5;
    double horizon = 1.0;
    std::vector<double> values; ///< m + 1 values at i T / m; values[0] == 0

    std::size_t points() const noexcept { return values.empty() ? 0 : values.size() - 1; }
    double step() const noexcept { return horizon / static_cast<double>(points()); }
    double time(std::size_t i) const noexcept {
        return horizon * static_cast<double>(i) / static_cast<double>(points());
    }
};

enum class FbmMethod { automatic, circulant, cholesky };

inline void check_hurst(double hurst) {
    if (!(hurst > 0.0 && hurst < 1.0))
        throw DomainError("Hurst parameter must lie in (0, 1), got " + std::to_string(hurst));
}

inline double fbm_covariance(double s, double t, double hurst) {
    check_hurst(hurst);
    if (s < 0.0 || t < 0.0) throw DomainError("fbm_covariance: times must be nonnegative");
    const double h2 = 2.0 * hurst;
    return 0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(t - s), h2));
}

/// Autocovariance of unit-step fractional Gaussian noise at integer lag.
inline double fgn_autocovariance(long lag, double hurst) {
    const double k = std::abs(static_cast<double>(lag));
    const double h2 = 2.0 * hurst;
    return 0.5 * (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) + std::pow(std::abs(k - 1.0), h2));
}

namespace detail {

// FFTW planning is not thread safe; execution on fresh aligned arrays is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

inline fftw_plan forward_plan(std::size_t n) {
    static std::map<std::size_t, fftw_plan> plans;
    std::lock_guard lock(fftw_planner_mutex());
    auto it = plans.find(n);
    if (it != plans.end()) return it->second;
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    plans.emplace(n, p);
    return p;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n) : in(fftw_alloc_complex(n)), out(fftw_alloc_complex(n)), size(n) {}
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    ~FftwBuffer() {
        fftw_free(in);
        fftw_free(out);
    }
    fftw_complex* in;
    fftw_complex* out;
    std::size_t size;
};

inline FftwBuffer& thread_buffer(std::size_t n) {
    thread_local std::unordered_map<std::size_t, std::unique_ptr<FftwBuffer>> buffers;
    auto& slot = buffers[n];
    if (!slot) slot = std::make_unique<FftwBuffer>(n);
    return *slot;
}

/// Unnormalised forward DFT: out_j = sum_k in_k exp(-2 pi i j k / n).
inline void fft_forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
    const std::size_t n = in.size();
    auto& buf = thread_buffer(n);
    std::memcpy(buf.in, in.data(), n * sizeof(fftw_complex));
    fftw_execute_dft(forward_plan(n), buf.in, buf.out);
    std::memcpy(out.data(), buf.out, n * sizeof(fftw_complex));
}

inline std::vector<double> compute_circulant_eigenvalues(double hurst, std::size_t half) {
    const std::size_t len = 2 * half;
    std::vector<std::complex<double>> row(len), spectrum(len);
    for (std::size_t j = 0; j < len; ++j) {
        const long lag = j <= half ? static_cast<long>(j) : static_cast<long>(len - j);
        row[j] = fgn_autocovariance(lag, hurst);
    }
    fft_forward(row, spectrum);
    std::vector<double> lambda(len);
    for (std::size_t k = 0; k < len; ++k) lambda[k] = spectrum[k].real();
    return lambda;
}

} // namespace detail

/// Eigenvalues of the size-2M circulant embedding of unit-step fGn
/// autocovariance. Cached per (hurst, M).
inline std::shared_ptr<const std::vector<double>> circulant_eigenvalues(double hurst, std::size_t half) {
    check_hurst(hurst);
    if (half == 0) throw DomainError("circulant_eigenvalues: embedding half-size must be positive");
    static std::mutex mutex;
    static std::map<std::pair<double, std::size_t>, std::shared_ptr<const std::vector<double>>> cache;
    {
        std::lock_guard lock(mutex);
        auto it = cache.find({hurst, half});
        if (it != cache.end()) return it->second;
    }
    auto lambda = std::make_shared<const std::vector<double>>(detail::compute_circulant_eigenvalues(hurst, half));
    std::lock_guard lock(mutex);
    return cache.try_emplace({hurst, half}, std::move(lambda)).first->second;
}

inline bool embedding_nonnegative(const std::vector<double>& lambda) {
    return std::all_of(lambda.begin(), lambda.end(), [](double l) { return l >= 0.0; });
}

/// Dense Cholesky is O(m^3); grids beyond this size are rejected.
inline constexpr std::size_t kMaxCholeskyPoints = 4096;

namespace detail {

inline Eigen::MatrixXd interior_covariance(double hurst, double horizon, std::size_t m) {
    const auto n = static_cast<Eigen::Index>(m);
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double s = horizon * static_cast<double>(i + 1) / static_cast<double>(m);
            const double t = horizon * static_cast<double>(j + 1) / static_cast<double>(m);
            cov(i, j) = cov(j, i) = fbm_covariance(s, t, hurst);
        }
    return cov;
}

inline Eigen::MatrixXd cholesky_factor(double hurst, double horizon, std::size_t m) {
    if (m > kMaxCholeskyPoints)
        throw EmbeddingError("Cholesky fallback limited to " + std::to_string(kMaxCholeskyPoints) +
                             " points, requested " + std::to_string(m));
    Eigen::LLT<Eigen::MatrixXd> llt(interior_covariance(hurst, horizon, m));
    if (llt.info() != Eigen::Success) throw EmbeddingError("fBm covariance is not positive definite");
    return llt.matrixL();
}

template <UniformSource S>
FbmPath fbm_path_cholesky(double hurst, double horizon, std::size_t m, S& stream) {
    const Eigen::MatrixXd factor = cholesky_factor(hurst, horizon, m);
    Eigen::VectorXd z(static_cast<Eigen::Index>(m));
    fill_gaussian(std::span<double>(z.data(), m), stream);
    const Eigen::VectorXd x = factor.triangularView<Eigen::Lower>() * z;
    FbmPath path{hurst, horizon, std::vector<double>(m + 1, 0.0)};
    for (std::size_t i = 0; i < m; ++i) path.values[i + 1] = x(static_cast<Eigen::Index>(i));
    return path;
}

template <UniformSource S>
FbmPath fbm_path_circulant(double hurst, double horizon, std::size_t m,
                           const std::vector<double>& lambda, S& stream) {
    const std::size_t len = lambda.size();
    std::vector<double> z(2 * len);
    fill_gaussian(std::span<double>(z), stream);
    std::vector<std::complex<double>> w(len), y(len);
    const double inv_len = 1.0 / static_cast<double>(len);
    for (std::size_t k = 0; k < len; ++k) {
        const double scale = std::sqrt(lambda[k] * inv_len);
        w[k] = {scale * z[2 * k], scale * z[2 * k + 1]};
    }
    fft_forward(w, y);
    FbmPath path{hurst, horizon, std::vector<double>(m + 1, 0.0)};
    const double step_scale = std::pow(horizon / static_cast<double>(m), hurst);
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        acc += step_scale * y[i].real();
        path.values[i + 1] = acc;
    }
    return path;
}

template <UniformSource S>
FbmPath brownian_path(double horizon, std::size_t m, S& stream) {
    FbmPath path{0.5, horizon, std::vector<double>(m + 1, 0.0)};
    fill_gaussian(std::span<double>(path.values).subspan(1), stream);
    const double scale = std::sqrt(horizon / static_cast<double>(m));
    double acc = 0.0;
    for (std::size_t i = 1; i <= m; ++i) {
        acc += scale * path.values[i];
        path.values[i] = acc;
    }
    return path;
}

} // namespace detail

/// One fBm path with m steps on [0, horizon].
template <UniformSource S>
FbmPath fbm_path(double hurst, double horizon, std::size_t m, S& stream,
                 FbmMethod method = FbmMethod::automatic) {
    check_hurst(hurst);
    if (!(horizon > 0.0)) throw DomainError("fbm_path: horizon must be positive");
    if (m == 0) throw DomainError("fbm_path: at least one step is required");
    if (method == FbmMethod::cholesky) return detail::fbm_path_cholesky(hurst, horizon, m, stream);
    if (method == FbmMethod::automatic && hurst == 0.5) return detail::brownian_path(horizon, m, stream);
    const auto lambda = circulant_eigenvalues(hurst, std::bit_ceil(m));
    if (!embedding_nonnegative(*lambda)) {
        if (method == FbmMethod::circulant)
            throw EmbeddingError("circulant embedding has a negative eigenvalue (H = " +
                                 std::to_string(hurst) + ", m = " + std::to_string(m) + ")");
        return detail::fbm_path_cholesky(hurst, horizon, m, stream);
    }
    return detail::fbm_path_circulant(hurst, horizon, m, *lambda, stream);
}

/**
 * Covariance matrix of (B_{t_0}, ..., B_{t_m}) that the generator actually
 * samples from, computed analytically from its construction: for the
 * circulant method the realised fGn autocovariance is the inverse DFT of the
 * embedding eigenvalues (evaluated by direct summation), cumulated twice.
 */
inline Eigen::MatrixXd targeted_covariance(double hurst, double horizon, std::size_t m,
                                           FbmMethod method = FbmMethod::automatic) {
    check_hurst(hurst);
    const auto n = static_cast<Eigen::Index>(m + 1);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    const double step = horizon / static_cast<double>(m);

    if (method == FbmMethod::automatic && hurst == 0.5) {
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) cov(i, j) = step * static_cast<double>(std::min(i, j));
        return cov;
    }

    const auto lambda = circulant_eigenvalues(hurst, std::bit_ceil(m));
    const bool use_cholesky =
        method == FbmMethod::cholesky || (method == FbmMethod::automatic && !embedding_nonnegative(*lambda));
    if (use_cholesky) {
        const Eigen::MatrixXd factor = detail::cholesky_factor(hurst, horizon, m);
        cov.bottomRightCorner(n - 1, n - 1) = factor * factor.transpose();
        return cov;
    }
    if (!embedding_nonnegative(*lambda)) throw EmbeddingError("circulant embedding has a negative eigenvalue");

    const std::size_t len = lambda->size();
    std::vector<double> realised(m);
    for (std::size_t d = 0; d < m; ++d) {
        double acc = 0.0;
        for (std::size_t k = 0; k < len; ++k)
            acc += (*lambda)[k] * std::cos(2.0 * std::numbers::pi * static_cast<double>((d * k) % len) /
                                           static_cast<double>(len));
        realised[d] = acc / static_cast<double>(len);
    }
    // cov(i, j) = step^{2H} sum_{a < i} sum_{b < j} r(a - b), by 2-D prefix sums.
    const double scale = std::pow(step, 2.0 * hurst);
    for (Eigen::Index i = 1; i < n; ++i)
        for (Eigen::Index j = 1; j < n; ++j) {
            const auto lag = static_cast<std::size_t>(std::abs((i - 1) - (j - 1)));
            cov(i, j) = cov(i - 1, j) + cov(i, j - 1) - cov(i - 1, j - 1) + scale * realised[lag];
        }
    return cov;
}

/// max over grid pairs of |B_i - B_j| / |t_i - t_j|^exponent.
inline double holder_ratio(const FbmPath& path, double exponent) {
    if (!(exponent > 0.0 && exponent <= 1.0))
        throw DomainError("holder_ratio: exponent must lie in (0, 1]");
    if (path.values.size() < 2) throw DomainError("holder_ratio: need at least two grid points");
    const std::size_t n = path.values.size();
    std::vector<double> lag_power(n);
    for (std::size_t d = 1; d < n; ++d) lag_power[d] = std::pow(path.time(d), exponent);
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            best = std::max(best, std::abs(path.values[j] - path.values[i]) / lag_power[j - i]);
    return best;
}

/// Restriction of a path to the coarser grid with `points` steps; exact in law.
inline FbmPath subsample(const FbmPath& path, std::size_t points) {
    const std::size_t m = path.points();
    if (points == 0 || m % points != 0)
        throw DomainError("subsample: " + std::to_string(points) + " does not divide " + std::to_string(m));
    const std::size_t stride = m / points;
    FbmPath out{path.hurst, path.horizon, std::vector<double>(points + 1)};
    for (std::size_t i = 0; i <= points; ++i) out.values[i] = path.values[i * stride];
    return out;
}

} // namespace stabsim

#endif // STABSIM_FBM_HPP

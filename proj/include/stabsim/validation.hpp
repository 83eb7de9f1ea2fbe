/**
 * Monte Carlo diagnostics: empirical characteristic functions, least-squares
 * lines with R^2, the two-sample Kolmogorov-Smirnov distance and a
 * CF-based stable scale fit.
 *
 * Scale convention: a symmetric alpha-stable variable with scale sigma has
 * |CF(u)| = exp(-(sigma |u|)^alpha). At alpha = 2 this gives variance 2 sigma^2.
 */
#ifndef STABSIM_VALIDATION_HPP
#define STABSIM_VALIDATION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace stabsim {

/// Row-major replicate x time matrix.
class PathMatrix {
public:
    PathMatrix() = default;
    PathMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }

    std::vector<double> column(std::size_t c) const {
        std::vector<double> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
        return out;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct CfEstimate {
    double u = 0.0;
    std::vector<double> times;
    std::vector<double> re;
    std::vector<double> im;
    std::vector<double> stderr_modulus; ///< Monte Carlo standard error of |CF|

    double modulus(std::size_t i) const { return std::hypot(re[i], im[i]); }
};

/// Per-column averages of cos(u Y) and sin(u Y). The standard error of |CF|
/// is the delta-method propagation of the cos/sin sample covariance.
inline CfEstimate empirical_cf(const PathMatrix& samples, std::span<const double> times, double u) {
    if (samples.rows() < 2) throw DomainError("empirical_cf: need at least 2 sample paths");
    if (times.size() != samples.cols()) throw ShapeError("empirical_cf: time grid does not match samples");
    const std::size_t n = samples.rows();
    const auto nd = static_cast<double>(n);
    CfEstimate cf{u, {times.begin(), times.end()}, {}, {}, {}};
    cf.re.resize(samples.cols());
    cf.im.resize(samples.cols());
    cf.stderr_modulus.resize(samples.cols());
    for (std::size_t c = 0; c < samples.cols(); ++c) {
        double sc = 0.0, ss = 0.0, scc = 0.0, sss = 0.0, scs = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double a = u * samples(r, c);
            const double co = std::cos(a);
            const double si = std::sin(a);
            sc += co;
            ss += si;
            scc += co * co;
            sss += si * si;
            scs += co * si;
        }
        const double mc = sc / nd;
        const double ms = ss / nd;
        const double vcc = std::max(0.0, scc / nd - mc * mc) * nd / (nd - 1.0);
        const double vss = std::max(0.0, sss / nd - ms * ms) * nd / (nd - 1.0);
        const double vcs = (scs / nd - mc * ms) * nd / (nd - 1.0);
        cf.re[c] = mc;
        cf.im[c] = ms;
        const double mod = std::hypot(mc, ms);
        double var;
        if (mod > 0.0)
            var = (mc * mc * vcc + ms * ms * vss + 2.0 * mc * ms * vcs) / (mod * mod);
        else
            var = vcc + vss;
        cf.stderr_modulus[c] = std::sqrt(std::max(0.0, var) / nd);
    }
    return cf;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares. Constant y gives R^2 = 1 when the residuals
/// vanish and 0 otherwise.
inline LinearFit linreg_r2(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ShapeError("linreg_r2: x and y differ in length");
    if (x.size() < 3) throw DomainError("linreg_r2: need at least 3 points");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw DomainError("linreg_r2: x values are all equal");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    if (syy == 0.0)
        fit.r2 = ss_res == 0.0 ? 1.0 : 0.0;
    else
        fit.r2 = 1.0 - ss_res / syy;
    return fit;
}

/// sup_x |F_a(x) - F_b(x)| over the pooled sample points.
inline double ks_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("ks_distance: samples must be nonempty");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const auto na = static_cast<double>(sa.size());
    const auto nb = static_cast<double>(sb.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double x = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] == x) ++i;
        while (j < sb.size() && sb[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

namespace detail {

inline double median_abs(std::span<const double> x) {
    std::vector<double> a(x.size());
    std::transform(x.begin(), x.end(), a.begin(), [](double v) { return std::abs(v); });
    const auto mid = a.begin() + static_cast<std::ptrdiff_t>(a.size() / 2);
    std::nth_element(a.begin(), mid, a.end());
    return *mid;
}

} // namespace detail

/**
 * Scale sigma of a symmetric alpha-stable sample. With s = median |x| the
 * frequencies are u_j = j / (4 s), j = 1..4; the model
 * log(-log |CF(u)|) = alpha log sigma + alpha log u is fitted with the slope
 * fixed, so alpha log sigma is the mean residual of the valid points.
 */
inline double fit_scale_by_cf(std::span<const double> samples, double alpha) {
    if (samples.empty()) throw DomainError("fit_scale_by_cf: no samples");
    if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("fit_scale_by_cf: alpha must lie in (0, 2]");
    const double s = detail::median_abs(samples);
    if (!(s > 0.0)) throw FitError("fit_scale_by_cf: degenerate sample, empirical CF is identically 1");
    const auto n = static_cast<double>(samples.size());
    double acc = 0.0;
    int used = 0;
    for (int j = 1; j <= 4; ++j) {
        const double u = j / (4.0 * s);
        double c = 0.0, si = 0.0;
        for (double x : samples) {
            c += std::cos(u * x);
            si += std::sin(u * x);
        }
        const double mod = std::hypot(c, si) / n;
        if (!(mod < 1.0 && mod > 0.0)) continue;
        acc += std::log(-std::log(mod)) - alpha * std::log(u);
        ++used;
    }
    if (used == 0) throw FitError("fit_scale_by_cf: |CF| >= 1 at every frequency");
    return std::exp(acc / used / alpha);
}

/// Regression of log |CF(t)| on t over the points with t > 0.
inline LinearFit cf_log_linearity(const CfEstimate& cf) {
    std::vector<double> t, y;
    for (std::size_t i = 0; i < cf.times.size(); ++i) {
        if (!(cf.times[i] > 0.0)) continue;
        t.push_back(cf.times[i]);
        y.push_back(std::log(cf.modulus(i)));
    }
    return linreg_r2(t, y);
}

} // namespace stabsim

#endif // STABSIM_VALIDATION_HPP

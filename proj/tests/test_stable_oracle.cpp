#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <stabsim/stable_oracle.hpp>
#include <stabsim/validation.hpp>

using namespace stabsim;

namespace {

std::vector<double> draw(double alpha, std::size_t n, std::uint64_t seed) {
    RandomStream s(seed, 0);
    std::vector<double> x(n);
    for (auto& v : x) v = oracle::sample_stable(alpha, s);
    return x;
}

double quantile(std::vector<double> x, double p) {
    const auto k = static_cast<std::size_t>(p * static_cast<double>(x.size() - 1));
    std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(k), x.end());
    return x[k];
}

} // namespace

TEST(StableOracle, AlphaTwoIsGaussianWithVarianceTwo) {
    const auto x = draw(2.0, 100000, 11);
    double mean = 0.0, var = 0.0, m4 = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    for (double v : x) {
        var += (v - mean) * (v - mean);
        m4 += std::pow(v - mean, 4);
    }
    var /= static_cast<double>(x.size());
    m4 /= static_cast<double>(x.size());
    const double se = std::sqrt((m4 - var * var) / static_cast<double>(x.size()));
    EXPECT_LT(std::abs(var - 2.0), 3.0 * se);
}

TEST(StableOracle, AlphaOneIsStandardCauchy) {
    const auto x = draw(1.0, 100000, 12);
    // Asymptotic quantile errors: the density is 1/pi at 0 and 1/(2 pi) at +-1;
    // the interquartile range has variance (1/4) / (n f^2) after the covariance term.
    const double n = 100000.0;
    const double se_med = std::sqrt(0.25 / n) * std::numbers::pi;
    const double se_iqr = std::sqrt(0.25 / n) * 2.0 * std::numbers::pi;
    EXPECT_LT(std::abs(quantile(x, 0.5)), 3.0 * se_med);
    EXPECT_LT(std::abs(quantile(x, 0.75) - quantile(x, 0.25) - 2.0), 3.0 * se_iqr);
}

// Under exact symmetry D(x, -x) reaches 0.02 in about 9% of runs at n = 10^4;
// at n = 10^5 it stays below 0.01.
TEST(StableOracle, SymmetricForSeveralAlphas) {
    for (double alpha : {0.5, 0.8, 1.0, 1.2, 1.5, 1.9}) {
        const auto x = draw(alpha, 100000, 13);
        std::vector<double> neg(x.size());
        std::transform(x.begin(), x.end(), neg.begin(), [](double v) { return -v; });
        EXPECT_LT(ks_distance(x, neg), 0.02) << "alpha = " << alpha;
    }
}

TEST(StableOracle, UnitScaleConvention) {
    // |CF(1)| = e^-1 for every alpha under the standard scale.
    for (double alpha : {0.8, 1.2, 1.5}) {
        const auto x = draw(alpha, 100000, 14);
        EXPECT_NEAR(fit_scale_by_cf(x, alpha), 1.0, 0.03) << "alpha = " << alpha;
    }
}

TEST(StableOracle, RejectsAlphaOutsideRange) {
    RandomStream s(1, 1);
    EXPECT_THROW(oracle::sample_stable(0.0, s), DomainError);
    EXPECT_THROW(oracle::sample_stable(2.5, s), DomainError);
    EXPECT_NO_THROW(oracle::sample_stable(2.0, s));
}

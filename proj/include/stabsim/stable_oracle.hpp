/**
 * Direct symmetric alpha-stable sampler, used only as an independent
 * reference for the series representation.
 *
 * Chambers-Mallows-Stuck transform with V uniform on (-pi/2, pi/2) and
 * W standard exponential (drawn in that order from the stream):
 *
 *   X = sin(alpha V) / cos(V)^(1/alpha) * (cos((1 - alpha) V) / W)^((1 - alpha)/alpha)
 *
 * and X = tan(V) when alpha = 1. X has characteristic function exp(-|u|^alpha);
 * at alpha = 2 this is a Gaussian of variance 2.
 */
#ifndef STABSIM_STABLE_ORACLE_HPP
#define STABSIM_STABLE_ORACLE_HPP

#include <cmath>
#include <numbers>
#include <string>

#include "errors.hpp"
#include "random.hpp"

namespace stabsim::oracle {

template <UniformSource S>
double sample_stable(double alpha, S& stream) {
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw DomainError("sample_stable: alpha must lie in (0, 2], got " + std::to_string(alpha));
    const double v = std::numbers::pi * (stream.uniform() - 0.5);
    const double w = sample_exponential(stream);
    if (alpha == 1.0) return std::tan(v);
    return std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
           std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
}

} // namespace stabsim::oracle

#endif // STABSIM_STABLE_ORACLE_HPP

#ifndef STABSIM_ERRORS_HPP
#define STABSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace stabsim {

/// An argument lies outside the domain where the operation is defined.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A series configuration violates one of its parameter constraints.
/// The message names the violated constraint.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Curves or sample sets that must share a grid do not.
class ShapeError : public std::length_error {
public:
    explicit ShapeError(const std::string& what) : std::length_error(what) {}
};

/// The circulant embedding of a covariance is not nonnegative definite.
class EmbeddingError : public std::runtime_error {
public:
    explicit EmbeddingError(const std::string& what) : std::runtime_error(what) {}
};

/// A statistical fit has no information to work with (e.g. CF identically 1).
class FitError : public std::runtime_error {
public:
    explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace stabsim

#endif // STABSIM_ERRORS_HPP

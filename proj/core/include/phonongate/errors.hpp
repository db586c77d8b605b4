#pragma once

#include <stdexcept>
#include <string>

namespace phonongate {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Mismatched tensor layouts, unknown factor labels, wrong dimensions.
class LayoutError : public Error {
public:
    explicit LayoutError(const std::string& what) : Error("layout error: " + what) {}
};

/// Physically inconsistent model input (non-Hermitian Hamiltonian, asymmetric
/// parameters given to a symmetric builder, ...).
class ModelError : public Error {
public:
    explicit ModelError(const std::string& what) : Error("model error: " + what) {}
};

/// Parameter outside its admissible range.
class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what) : Error("parameter error: " + what) {}
};

/// Function evaluated outside its mathematical domain.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error("domain error: " + what) {}
};

/// Step-size control gave up, or a conservation law was violated.
class IntegratorError : public Error {
public:
    explicit IntegratorError(const std::string& what) : Error("integrator error: " + what) {}
};

/// A truncated sum or Fock cutoff did not reach its tail tolerance.
class TruncationError : public Error {
public:
    explicit TruncationError(const std::string& what) : Error("truncation error: " + what) {}
};

/// A series failed to converge.
class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& what) : Error("convergence error: " + what) {}
};

/// Invalid gate or run configuration.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};

[[noreturn]] void throw_layout(const std::string& what);

}  // namespace phonongate

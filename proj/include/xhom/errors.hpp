#pragma once

#include <stdexcept>
#include <string>

namespace xhom {

/// Invalid or inconsistent input data (configuration, tables, parameters).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A query outside the domain where a model is defined (no Bragg solution,
/// energy outside table coverage, no dip, ...).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quadrature or solver failed its convergence check.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace xhom

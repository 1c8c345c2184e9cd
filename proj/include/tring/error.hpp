#pragma once

#include <stdexcept>
#include <string>

namespace tring {

/// Shapes or mode indices that do not conform.
class DimensionError : public std::invalid_argument {
public:
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input values outside the admissible domain (negative data, bad config).
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// A subproblem with no curvature (all-zero design matrix and no regularizer).
class DegenerateError : public std::runtime_error {
public:
    explicit DegenerateError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite objective or other floating-point breakdown.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// File-level failures: missing files, malformed containers, short reads.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tring

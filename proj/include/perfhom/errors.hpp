/// @file errors.hpp
/// @brief Exception hierarchy shared by all solvers and the CLI.
///
/// The CLI maps each family onto a process exit code:
///   InvalidConfig -> 2, GeometryError -> 3, NonConvergence -> 4.
#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace perfhom {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user-supplied parameters (grid size, epsilon, c0, tolerances...).
class InvalidConfig : public Error {
public:
    using Error::Error;
};

/// Two fields that live on different grids were combined.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// The hole geometry cannot be realized (overlapping holes, no active node).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Holes are too small for the grid to resolve them.
class UnderResolvedGeometry : public GeometryError {
public:
    using GeometryError::GeometryError;
};

/// An iterative solver ran out of iterations. Carries what it saw so far.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, std::vector<double> history)
        : Error(what), history_(std::move(history)) {}

    const std::vector<double>& history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

} // namespace perfhom

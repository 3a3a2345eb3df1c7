#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace curverec {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Vector or matrix sizes disagree, or a size is below the documented minimum.
class DimensionError : public Error {
public:
    using Error::Error;
};

// An argument value is outside its documented domain (bad k, non-finite
// input, off-grid price, ...).
class ValueError : public Error {
public:
    using Error::Error;
};

// A denominator was exactly zero. `index` is the 1-based index of the
// proportion / column / sample whose computation hit the zero.
class DivisionError : public Error {
public:
    DivisionError(const std::string& what, std::size_t index)
        : Error(what), index(index) {}
    std::size_t index;
};

// A factorization failed because the matrix is not positive definite.
class SingularMatrixError : public Error {
public:
    using Error::Error;
};

// An iterative solver did not converge within its sweep budget.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::size_t iterations)
        : Error(what), iterations(iterations) {}
    std::size_t iterations;
};

// Too few samples for the requested estimator.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// Supply and demand curves do not cross inside the price domain.
class NoEquilibriumError : public Error {
public:
    using Error::Error;
};

// Malformed input file.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace curverec

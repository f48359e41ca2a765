#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace defdist {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A pivot modulus fell below the relative threshold during factorization.
/// Signals a rank-deficient matrix, or a bad border vector when the matrix
/// is a bordered system.
class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& what, std::size_t step, double pivot_modulus)
        : Error(what), step(step), pivot_modulus(pivot_modulus) {}
    std::size_t step;
    double pivot_modulus;
};

class NonFiniteError : public Error {
public:
    using Error::Error;
};

class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

/// An iterative routine failed to meet its residual target within its
/// iteration cap. For singular-triplet extraction, `gap_estimate` is the
/// observed convergence ratio (close to 1 suggests a multiple smallest
/// singular value).
class NoConvergenceError : public Error {
public:
    NoConvergenceError(const std::string& what, double gap_estimate)
        : Error(what), gap_estimate(gap_estimate) {}
    double gap_estimate;
};

/// The bordered matrix M(alpha, beta, epsilon) could not be factorized or
/// did not yield trustworthy solves. The caller should retry with a fresh
/// border vector.
class SingularBorderedMatrixError : public Error {
public:
    using Error::Error;
};

/// A quantity that must be real came back with a significant imaginary
/// part. This indicates a construction bug (K or M not Hermitian), not a
/// data problem.
class ImaginaryLeakError : public Error {
public:
    ImaginaryLeakError(const std::string& what, double imag_part)
        : Error(what), imag_part(imag_part) {}
    double imag_part;
};

/// The 3x3 Newton system is numerically singular (F_alphabeta ~ 0).
/// Suggests a nearby matrix with a Jordan block of dimension greater
/// than 2; the method handles only the generic case.
class SingularJacobianError : public Error {
public:
    using Error::Error;
};

class BadParameterError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line) : Error(what), line(line) {}
    std::size_t line;
};

class UnsupportedFormatError : public Error {
public:
    using Error::Error;
};

/// A certification check failed; `quantity` names the offending value.
class CertificationError : public Error {
public:
    CertificationError(const std::string& what, std::string quantity)
        : Error(what), quantity(std::move(quantity)) {}
    std::string quantity;
};

}  // namespace defdist

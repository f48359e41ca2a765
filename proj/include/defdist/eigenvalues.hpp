#pragma once

#include <vector>

#include "defdist/complex_matrix.hpp"

namespace defdist::linalg {

/// Dimension cap for the diagnostic eigensolver. It exists for reporting
/// and certification only and is never called inside the Newton loop, so a
/// dense O(n^3) budget up to this size is acceptable.
inline constexpr std::size_t kDiagnosticDimCap = 512;

struct EigOptions {
    /// Total QR sweep budget is sweep_cap_factor * n.
    std::size_t sweep_cap_factor = 30;
    /// Each returned eigenvalue carries backward error at most
    /// backward_error_rel * ||B||_F, verified by inverse iteration with a
    /// Rayleigh-quotient polishing pass.
    double backward_error_rel = 1e-8;
};

/// All n eigenvalues of a square complex matrix (unordered), via Hessenberg
/// reduction and shifted QR. Throws BadParameterError above the dimension
/// cap and NoConvergenceError if QR or the residual verification fails.
std::vector<Complex> eigenvalues_diagnostic(const ComplexMatrix& B, const EigOptions& opts = {});

}  // namespace defdist::linalg

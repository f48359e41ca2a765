#pragma once

#include "defdist/complex_matrix.hpp"

namespace defdist::linalg {

/// Smallest singular value of a square matrix B with unit left/right
/// singular vectors: B v = sigma u, B^H u = sigma v.
/// Phase convention: the entry of v with largest modulus is real and
/// positive (ties broken towards the lowest index), which makes repeated
/// calls on the same matrix bitwise identical.
struct SingularTriplet {
    double sigma = 0.0;
    ComplexVector u;
    ComplexVector v;
};

struct TripletOptions {
    /// Inverse-iteration cap; exceeding it raises NoConvergenceError with a
    /// cluster gap estimate in the payload.
    std::size_t max_iter = 200;
    /// Internal stopping target, relative to ||B||_F. The returned triplet
    /// satisfies residuals <= 1e-10 ||B||_F in any case.
    double residual_target_rel = 1e-12;
};

/// Computes the smallest singular triplet by inverse iteration on the
/// augmented Hermitian matrix [[0, B], [B^H, 0]] with shift 0 (tiny pivots
/// clamped, so numerically singular B is fine). Residual contract:
/// ||B v - sigma u|| <= 1e-10 ||B||_F and ||B^H u - sigma v|| <= 1e-10 ||B||_F.
SingularTriplet smallest_singular_triplet(const ComplexMatrix& B, const TripletOptions& opts = {});

}  // namespace defdist::linalg

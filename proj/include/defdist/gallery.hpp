#pragma once

#include "defdist/complex_matrix.hpp"

namespace defdist::gallery {

enum class GalleryKind { kahan, grcar, embedded_kahan };

struct GallerySpec {
    GalleryKind kind = GalleryKind::kahan;
    std::size_t n = 6;
    double kahan_target = 0.1;  // value of s^{n-1}
    std::size_t block = 6;      // embedded_kahan block size
};

/// Upper triangular Kahan matrix: entry (i,i) = s^i, entry (i,j) = -s^i c
/// for j > i, with s = target^{1/(n-1)} and c = sqrt(1 - s^2).
ComplexMatrix kahan(std::size_t n, double target = 0.1);

/// Grcar Toeplitz matrix: -1 on the first subdiagonal, 1 on the diagonal
/// and the first three superdiagonals.
ComplexMatrix grcar(std::size_t n);

/// n x n identity with the leading block x block submatrix replaced by
/// kahan(block, 0.1).
ComplexMatrix embedded_kahan(std::size_t n, std::size_t block = 6);

ComplexMatrix make(const GallerySpec& spec);

}  // namespace defdist::gallery

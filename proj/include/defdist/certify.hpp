#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "defdist/complex_matrix.hpp"
#include "defdist/implicit_determinant.hpp"

namespace defdist::certify {

struct CertifyTolerances {
    double residual_rel = 1e-10;    // on residuals relative to ||A||_F
    double orthogonality = 1e-10;   // absolute bound on |u^H v|
};

/// The certified output: z* is a defective eigenvalue of
/// B = A - eps* u* v*^H, with ||A - B|| = eps*.
/// All residuals are recomputed from fresh matrix-vector products, never
/// from Newton's internal quantities.
struct DefectiveCertificate {
    Complex z_star;
    double epsilon_star = 0.0;
    ComplexVector u_star, v_star;  // unit 2-norm
    ComplexMatrix B;
    double residual_right = 0.0;  // ||B v* - z* v*||
    double residual_left = 0.0;   // ||u*^H B - z* u*^H||
    double orthogonality = 0.0;   // |u*^H v*|
    double F_alphabeta = 0.0;
    /// The two eigenvalues of A closest to z*; empty when n exceeds the
    /// diagnostic eigensolver cap.
    std::vector<Complex> coalescing_pair;
};

/// Builds and verifies the certificate from a converged Newton state.
/// Throws CertificationError (naming the failing quantity) if a residual
/// or the orthogonality check misses its tolerance.
DefectiveCertificate certify(const ComplexMatrix& A, const impdet::IterateState& final_state,
                             const CertifyTolerances& tol = {});

/// sigma_min(A - z I) sampled over a rectangle; values stored row-major
/// with the imaginary axis as the outer index.
struct PseudospectrumGrid {
    std::vector<double> re;
    std::vector<double> im;
    std::vector<double> sigma;  // size re.size() * im.size()
    double at(std::size_t i_im, std::size_t i_re) const { return sigma[i_im * re.size() + i_re]; }
};

PseudospectrumGrid sigma_min_grid(const ComplexMatrix& A, double re_lo, double re_hi, double im_lo,
                                  double im_hi, std::size_t n_re, std::size_t n_im);

/// CSV export: header "re,im,sigma_min", one row per point, 17 significant
/// digits, row-major over (im outer, re inner).
void write_grid_csv(std::ostream& out, const PseudospectrumGrid& grid);

/// Report-only probe of sigma_min(A - zI) at z* and at the 8 compass
/// neighbors at distance `step`. At a generic coalescence point z* is a
/// saddle: some directions curve up, some down, and the minimum over the
/// ring sits O(step^2) below epsilon*.
struct SaddleReport {
    double center_sigma = 0.0;
    std::array<double, 8> ring_sigma{};  // E, NE, N, NW, W, SW, S, SE
    double ring_min = 0.0;
    double ring_max = 0.0;
    bool saddle_signature = false;  // opposite curvature signs across axis pairs
    bool degenerate = false;        // epsilon* ~ 0: sigma cannot descend below 0
    double ring_min_defect = 0.0;   // |ring_min - epsilon*|
};

SaddleReport saddle_check(const ComplexMatrix& A, Complex z_star, double epsilon_star, double step);

}  // namespace defdist::certify

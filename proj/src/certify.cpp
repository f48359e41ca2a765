#include "defdist/certify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "defdist/eigenvalues.hpp"
#include "defdist/errors.hpp"
#include "defdist/singular_triplet.hpp"

namespace defdist::certify {

namespace {

double sigma_min_at(const ComplexMatrix& A, Complex z) {
    ComplexMatrix shifted = A;
    for (std::size_t i = 0; i < A.rows(); ++i) shifted(i, i) -= z;
    return linalg::smallest_singular_triplet(shifted).sigma;
}

}  // namespace

DefectiveCertificate certify(const ComplexMatrix& A, const impdet::IterateState& final_state,
                             const CertifyTolerances& tol) {
    if (!A.is_square()) throw DimensionMismatchError("certify: matrix must be square");
    const std::size_t n = A.rows();
    if (final_state.x.size() != 2 * n)
        throw DimensionMismatchError("certify: state does not belong to this matrix");

    DefectiveCertificate cert;
    cert.z_star = Complex(final_state.alpha, final_state.beta);
    cert.F_alphabeta = final_state.F_alphabeta();

    ComplexVector u = final_state.u();
    ComplexVector v = final_state.v();
    double eps = final_state.epsilon;
    if (eps < 0.0) {
        // (A - zI)v = eps u with eps < 0 is the triplet (-eps, -u, v).
        eps = -eps;
        for (Complex& e : u) e = -e;
    }
    cert.epsilon_star = eps;

    const double norm_a = frobenius_norm(A);
    const double nu = norm2(u);
    const double nv = norm2(v);
    const double xscale = std::max(nu, nv);
    if (!(xscale > 0.0)) throw CertificationError("certify: x vanished", "x halves");
    if (eps > 1e-12 * norm_a) {
        // The two halves share a common norm whenever epsilon > 0; this is
        // a consequence of the singular-vector equations.
        if (!(nu > 0.0) || !(nv > 0.0))
            throw CertificationError("certify: a half of x vanished", "x halves");
        if (std::abs(nu - nv) > 1e-8 * xscale)
            throw CertificationError("certify: ||u|| and ||v|| differ by " +
                                         std::to_string(std::abs(nu - nv) / xscale) +
                                         " relative; x is not a singular-vector pair",
                                     "half norms");
        for (Complex& e : u) e /= nu;
        for (Complex& e : v) e /= nv;
    } else {
        // Degenerate root (epsilon* ~ 0, B = A already defective): the
        // kernel of K splits and the bordered solve may return x with one
        // half empty. Each nonzero half is a valid null vector; a vanished
        // half is recovered from the singular triplet of A - z* I.
        const bool need_u = nu <= 1e-8 * xscale;
        const bool need_v = nv <= 1e-8 * xscale;
        if (need_u || need_v) {
            ComplexMatrix shifted = A;
            for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= cert.z_star;
            linalg::SingularTriplet t = linalg::smallest_singular_triplet(shifted);
            if (need_u) u = std::move(t.u);
            if (need_v) v = std::move(t.v);
        }
        const double nu2 = norm2(u);
        const double nv2 = norm2(v);
        if (!(nu2 > 0.0) || !(nv2 > 0.0))
            throw CertificationError("certify: a half of x vanished", "x halves");
        for (Complex& e : u) e /= nu2;
        for (Complex& e : v) e /= nv2;
    }

    // B = A - eps u v^H
    ComplexMatrix B = A;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) B(i, j) -= eps * u[i] * std::conj(v[j]);

    const ComplexVector bv = matvec(B, v);
    const ComplexVector bhu = adjoint_matvec(B, u);
    double rr = 0.0, rl = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        rr += std::norm(bv[i] - cert.z_star * v[i]);
        rl += std::norm(bhu[i] - std::conj(cert.z_star) * u[i]);
    }
    cert.residual_right = std::sqrt(rr);
    cert.residual_left = std::sqrt(rl);
    cert.orthogonality = std::abs(dot(u, v));
    cert.u_star = std::move(u);
    cert.v_star = std::move(v);
    cert.B = std::move(B);

    if (cert.residual_right > tol.residual_rel * norm_a)
        throw CertificationError("certify: right residual " + std::to_string(cert.residual_right) +
                                     " exceeds " + std::to_string(tol.residual_rel * norm_a),
                                 "residual_right");
    if (cert.residual_left > tol.residual_rel * norm_a)
        throw CertificationError("certify: left residual " + std::to_string(cert.residual_left) +
                                     " exceeds " + std::to_string(tol.residual_rel * norm_a),
                                 "residual_left");
    if (cert.orthogonality > tol.orthogonality)
        throw CertificationError("certify: |u^H v| = " + std::to_string(cert.orthogonality) +
                                     " exceeds " + std::to_string(tol.orthogonality),
                                 "orthogonality");

    if (n <= linalg::kDiagnosticDimCap) {
        std::vector<Complex> evs = linalg::eigenvalues_diagnostic(A);
        std::sort(evs.begin(), evs.end(), [&](Complex a, Complex b) {
            return std::abs(a - cert.z_star) < std::abs(b - cert.z_star);
        });
        cert.coalescing_pair.assign(evs.begin(), evs.begin() + std::min<std::size_t>(2, evs.size()));
    }
    return cert;
}

PseudospectrumGrid sigma_min_grid(const ComplexMatrix& A, double re_lo, double re_hi, double im_lo,
                                  double im_hi, std::size_t n_re, std::size_t n_im) {
    if (!A.is_square()) throw DimensionMismatchError("sigma_min_grid: matrix must be square");
    if (n_re < 2 || n_im < 2) throw BadParameterError("sigma_min_grid: need >= 2 samples per axis");

    PseudospectrumGrid g;
    g.re.resize(n_re);
    g.im.resize(n_im);
    for (std::size_t i = 0; i < n_re; ++i)
        g.re[i] = re_lo + (re_hi - re_lo) * static_cast<double>(i) / static_cast<double>(n_re - 1);
    for (std::size_t i = 0; i < n_im; ++i)
        g.im[i] = im_lo + (im_hi - im_lo) * static_cast<double>(i) / static_cast<double>(n_im - 1);

    g.sigma.resize(n_re * n_im);
    for (std::size_t ii = 0; ii < n_im; ++ii)
        for (std::size_t ir = 0; ir < n_re; ++ir)
            g.sigma[ii * n_re + ir] = sigma_min_at(A, Complex(g.re[ir], g.im[ii]));
    return g;
}

void write_grid_csv(std::ostream& out, const PseudospectrumGrid& grid) {
    out << "re,im,sigma_min\n";
    char buf[96];
    for (std::size_t ii = 0; ii < grid.im.size(); ++ii) {
        for (std::size_t ir = 0; ir < grid.re.size(); ++ir) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", grid.re[ir], grid.im[ii],
                          grid.at(ii, ir));
            out << buf;
        }
    }
}

SaddleReport saddle_check(const ComplexMatrix& A, Complex z_star, double epsilon_star,
                          double step) {
    if (!(step > 0.0)) throw BadParameterError("saddle_check: step must be positive");
    SaddleReport rep;
    rep.center_sigma = sigma_min_at(A, z_star);
    constexpr double kSqrtHalf = 0.70710678118654752440;
    const std::array<Complex, 8> dirs = {
        Complex(1, 0),          Complex(kSqrtHalf, kSqrtHalf),   Complex(0, 1),
        Complex(-kSqrtHalf, kSqrtHalf), Complex(-1, 0),          Complex(-kSqrtHalf, -kSqrtHalf),
        Complex(0, -1),         Complex(kSqrtHalf, -kSqrtHalf)};
    for (std::size_t k = 0; k < 8; ++k)
        rep.ring_sigma[k] = sigma_min_at(A, z_star + step * dirs[k]);
    rep.ring_min = *std::min_element(rep.ring_sigma.begin(), rep.ring_sigma.end());
    rep.ring_max = *std::max_element(rep.ring_sigma.begin(), rep.ring_sigma.end());

    rep.degenerate = epsilon_star <= 16.0 * step * step * std::max(1.0, frobenius_norm(A));

    // Second differences along the four axis pairs (k, k+4); a saddle shows
    // both signs.
    bool has_up = false, has_down = false;
    for (std::size_t k = 0; k < 4; ++k) {
        const double curv = rep.ring_sigma[k] + rep.ring_sigma[k + 4] - 2.0 * rep.center_sigma;
        if (curv > 0.0) has_up = true;
        if (curv < 0.0) has_down = true;
    }
    rep.saddle_signature = has_up && has_down && !rep.degenerate;
    rep.ring_min_defect = std::abs(rep.ring_min - epsilon_star);
    return rep;
}

}  // namespace defdist::certify

#include "defdist/eigenvalues.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "defdist/errors.hpp"

namespace defdist::linalg {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

/// In-place unitary reduction to upper Hessenberg form (Householder).
void hessenberg_reduce(ComplexMatrix& H) {
    const std::size_t n = H.rows();
    if (n < 3) return;
    ComplexVector v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        const std::size_t m = n - k - 1;  // length of the subcolumn
        double xnorm2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) xnorm2 += std::norm(H(k + 1 + i, k));
        const double xnorm = std::sqrt(xnorm2);
        if (xnorm == 0.0) continue;
        const Complex x0 = H(k + 1, k);
        const double ax0 = std::abs(x0);
        const Complex phase = (ax0 == 0.0) ? Complex(1.0, 0.0) : x0 / ax0;
        const Complex beta = -phase * xnorm;
        // v = x - beta e1
        double vnorm2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            v[i] = H(k + 1 + i, k);
            if (i == 0) v[i] -= beta;
            vnorm2 += std::norm(v[i]);
        }
        if (vnorm2 == 0.0) continue;
        const double scale = 2.0 / vnorm2;
        // left: rows k+1..n-1, columns k..n-1
        for (std::size_t j = k; j < n; ++j) {
            Complex s(0.0, 0.0);
            for (std::size_t i = 0; i < m; ++i) s += std::conj(v[i]) * H(k + 1 + i, j);
            s *= scale;
            for (std::size_t i = 0; i < m; ++i) H(k + 1 + i, j) -= s * v[i];
        }
        // right: all rows, columns k+1..n-1
        for (std::size_t i = 0; i < n; ++i) {
            Complex s(0.0, 0.0);
            for (std::size_t j = 0; j < m; ++j) s += H(i, k + 1 + j) * v[j];
            s *= scale;
            for (std::size_t j = 0; j < m; ++j) H(i, k + 1 + j) -= s * std::conj(v[j]);
        }
        H(k + 1, k) = beta;
        for (std::size_t i = k + 2; i < n; ++i) H(i, k) = 0.0;
    }
}

/// Eigenvalues of [[a, b], [c, d]] by the stable quadratic formula.
std::pair<Complex, Complex> eig2x2(Complex a, Complex b, Complex c, Complex d) {
    const Complex m = 0.5 * (a + d);
    const Complex q = 0.5 * (a - d);
    const Complex s = std::sqrt(q * q + b * c);
    Complex l1 = m + s;
    Complex l2 = m - s;
    // recompute the smaller root from the determinant to limit cancellation
    const Complex det = a * d - b * c;
    if (std::abs(l1) > std::abs(l2)) {
        if (std::abs(l1) > 0.0) l2 = det / l1;
    } else if (std::abs(l2) > 0.0) {
        l1 = det / l2;
    }
    return {l1, l2};
}

/// Givens rotation with real c zeroing y against x:
/// [c, s; -conj(s), c] [x; y] = [r; 0].
void make_givens(Complex x, Complex y, double& c, Complex& s) {
    const double ay = std::abs(y);
    if (ay == 0.0) {
        c = 1.0;
        s = Complex(0.0, 0.0);
        return;
    }
    const double ax = std::abs(x);
    if (ax == 0.0) {
        c = 0.0;
        s = std::conj(y) / ay;
        return;
    }
    const double d = std::hypot(ax, ay);
    c = ax / d;
    s = (x / ax) * std::conj(y) / d;
}

/// Shifted QR on an upper Hessenberg matrix; returns all eigenvalues.
std::vector<Complex> hessenberg_qr(ComplexMatrix& H, std::size_t sweep_cap) {
    const std::size_t n = H.rows();
    std::vector<Complex> ev(n);
    std::size_t hi = n - 1;
    std::size_t sweeps = 0;
    std::size_t since_deflation = 0;

    while (true) {
        if (hi == 0) {
            ev[0] = H(0, 0);
            break;
        }
        // find the active block [lo..hi]: walk up until a negligible subdiagonal
        std::size_t lo = hi;
        while (lo > 0) {
            const double s = std::abs(H(lo - 1, lo - 1)) + std::abs(H(lo, lo));
            const double scale = (s == 0.0) ? frobenius_norm(H) : s;
            if (std::abs(H(lo, lo - 1)) <= kEps * scale) {
                H(lo, lo - 1) = 0.0;
                break;
            }
            --lo;
        }
        if (lo == hi) {
            ev[hi] = H(hi, hi);
            --hi;
            since_deflation = 0;
            continue;
        }
        if (lo + 1 == hi) {
            auto [l1, l2] = eig2x2(H(lo, lo), H(lo, hi), H(hi, lo), H(hi, hi));
            ev[lo] = l1;
            ev[hi] = l2;
            if (lo == 0) break;
            hi = lo - 1;
            since_deflation = 0;
            continue;
        }

        if (++sweeps > sweep_cap)
            throw NoConvergenceError("eigenvalues: QR sweep cap exceeded", 0.0);

        Complex mu;
        if (++since_deflation % 12 == 0) {
            // exceptional shift against rare stagnation
            mu = H(hi, hi) + 0.75 * std::abs(H(hi, hi - 1));
        } else {
            auto [l1, l2] = eig2x2(H(hi - 1, hi - 1), H(hi - 1, hi), H(hi, hi - 1), H(hi, hi));
            mu = (std::abs(l1 - H(hi, hi)) < std::abs(l2 - H(hi, hi))) ? l1 : l2;
        }

        // implicit single-shift bulge chase over [lo..hi]
        Complex x = H(lo, lo) - mu;
        Complex y = H(lo + 1, lo);
        for (std::size_t k = lo; k < hi; ++k) {
            double c;
            Complex s;
            make_givens(x, y, c, s);
            const std::size_t jfirst = (k == lo) ? lo : k - 1;
            for (std::size_t j = jfirst; j <= hi; ++j) {
                const Complex t1 = H(k, j);
                const Complex t2 = H(k + 1, j);
                H(k, j) = c * t1 + s * t2;
                H(k + 1, j) = -std::conj(s) * t1 + c * t2;
            }
            const std::size_t ilast = std::min(hi, k + 2);
            for (std::size_t i = lo; i <= ilast; ++i) {
                const Complex t1 = H(i, k);
                const Complex t2 = H(i, k + 1);
                H(i, k) = c * t1 + std::conj(s) * t2;
                H(i, k + 1) = -s * t1 + c * t2;
            }
            if (k + 1 < hi) {
                x = H(k + 1, k);
                y = H(k + 2, k);
            }
        }
    }
    return ev;
}

/// LU with partial pivoting specialized to upper Hessenberg matrices:
/// only rows k and k+1 compete at step k, so the whole factorization and
/// the solve are O(n^2). Tiny pivots are clamped (inverse-iteration use).
class HessenbergSolver {
public:
    HessenbergSolver(const ComplexMatrix& H, Complex shift, double clamp) : n_(H.rows()), a_(H) {
        for (std::size_t i = 0; i < n_; ++i) a_(i, i) -= shift;
        lower_.assign(n_ - 1, Complex(0.0, 0.0));
        swapped_.assign(n_ - 1, false);
        for (std::size_t k = 0; k + 1 < n_; ++k) {
            if (std::abs(a_(k + 1, k)) > std::abs(a_(k, k))) {
                swapped_[k] = true;
                for (std::size_t j = k; j < n_; ++j) std::swap(a_(k, j), a_(k + 1, j));
            }
            Complex piv = a_(k, k);
            if (std::abs(piv) < clamp) {
                piv = (piv == 0.0) ? Complex(clamp, 0.0) : piv * (clamp / std::abs(piv));
                a_(k, k) = piv;
            }
            const Complex l = a_(k + 1, k) / piv;
            lower_[k] = l;
            a_(k + 1, k) = 0.0;
            for (std::size_t j = k + 1; j < n_; ++j) a_(k + 1, j) -= l * a_(k, j);
        }
        Complex last = a_(n_ - 1, n_ - 1);
        if (std::abs(last) < clamp)
            a_(n_ - 1, n_ - 1) = (last == 0.0) ? Complex(clamp, 0.0) : last * (clamp / std::abs(last));
    }

    ComplexVector solve(ComplexVector b) const {
        for (std::size_t k = 0; k + 1 < n_; ++k) {
            if (swapped_[k]) std::swap(b[k], b[k + 1]);
            b[k + 1] -= lower_[k] * b[k];
        }
        for (std::size_t ii = n_; ii-- > 0;) {
            Complex s = b[ii];
            for (std::size_t j = ii + 1; j < n_; ++j) s -= a_(ii, j) * b[j];
            b[ii] = s / a_(ii, ii);
        }
        return b;
    }

private:
    std::size_t n_;
    ComplexMatrix a_;
    ComplexVector lower_;
    std::vector<bool> swapped_;
};

/// Verifies one eigenvalue against the Hessenberg matrix by inverse
/// iteration; polishes with the Rayleigh quotient if the residual is out of
/// tolerance. Returns the accepted eigenvalue.
Complex verify_eigenvalue(const ComplexMatrix& H0, Complex lambda, double norm_h, double tol_abs) {
    const std::size_t n = H0.rows();
    const double clamp = 4.0 * kEps * std::max(norm_h, 1e-300);
    Complex lam = lambda;
    for (int attempt = 0; attempt < 5; ++attempt) {
        HessenbergSolver slv(H0, lam, clamp);
        ComplexVector w(n);
        for (std::size_t i = 0; i < n; ++i)
            w[i] = Complex(1.0, static_cast<double>((i + 1) * (attempt + 1) % 7) * 0.25);
        double wn = norm2(w);
        for (int step = 0; step < 2; ++step) {
            w = slv.solve(std::move(w));
            wn = norm2(w);
            if (!(wn > 0.0) || !std::isfinite(wn)) break;
            for (Complex& e : w) e /= wn;
        }
        if (!(wn > 0.0) || !std::isfinite(wn)) continue;
        ComplexVector hw = matvec(H0, w);
        const Complex rayleigh = dot(w, hw);  // w unit
        double resid = 0.0;
        for (std::size_t i = 0; i < n; ++i) resid += std::norm(hw[i] - lam * w[i]);
        resid = std::sqrt(resid);
        if (resid <= tol_abs) return lam;
        double resid_r = 0.0;
        for (std::size_t i = 0; i < n; ++i) resid_r += std::norm(hw[i] - rayleigh * w[i]);
        resid_r = std::sqrt(resid_r);
        if (resid_r <= tol_abs) return rayleigh;
        lam = rayleigh;
    }
    throw NoConvergenceError("eigenvalues: residual verification failed", 0.0);
}

}  // namespace

std::vector<Complex> eigenvalues_diagnostic(const ComplexMatrix& B, const EigOptions& opts) {
    if (!B.is_square()) throw DimensionMismatchError("eigenvalues_diagnostic: matrix not square");
    const std::size_t n = B.rows();
    if (n == 0) throw DimensionMismatchError("eigenvalues_diagnostic: empty matrix");
    if (n > kDiagnosticDimCap)
        throw BadParameterError("eigenvalues_diagnostic: n = " + std::to_string(n) +
                                " exceeds the diagnostic cap " + std::to_string(kDiagnosticDimCap));
    check_finite(B, "eigenvalues_diagnostic");
    if (n == 1) return {B(0, 0)};

    ComplexMatrix H = B;
    hessenberg_reduce(H);
    const ComplexMatrix H0 = H;
    std::vector<Complex> ev = hessenberg_qr(H, opts.sweep_cap_factor * n);

    const double norm_b = frobenius_norm(B);
    const double tol_abs = opts.backward_error_rel * std::max(norm_b, 1e-300);
    for (Complex& lambda : ev) lambda = verify_eigenvalue(H0, lambda, norm_b, tol_abs);
    return ev;
}

}  // namespace defdist::linalg

#include "defdist/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "defdist/errors.hpp"

namespace defdist::linalg {

namespace {

std::atomic<std::uint64_t> g_factorizations{0};
std::atomic<std::uint64_t> g_solves{0};

inline double abs2(const Complex& z) {
    return z.real() * z.real() + z.imag() * z.imag();
}

}  // namespace

std::uint64_t factorization_count() { return g_factorizations.load(std::memory_order_relaxed); }
std::uint64_t solve_count() { return g_solves.load(std::memory_order_relaxed); }
void reset_counters() {
    g_factorizations.store(0, std::memory_order_relaxed);
    g_solves.store(0, std::memory_order_relaxed);
}

Factorization::Factorization(Factorization&& o) noexcept
    : n_(o.n_),
      lu_(std::move(o.lu_)),
      piv_(std::move(o.piv_)),
      norm_frob_(o.norm_frob_),
      norm_one_(o.norm_one_),
      cond_estimate_(o.cond_estimate_),
      pivot_growth_(o.pivot_growth_),
      clamped_(o.clamped_),
      solves_(o.solves_.load(std::memory_order_relaxed)) {}

Factorization& Factorization::operator=(Factorization&& o) noexcept {
    n_ = o.n_;
    lu_ = std::move(o.lu_);
    piv_ = std::move(o.piv_);
    norm_frob_ = o.norm_frob_;
    norm_one_ = o.norm_one_;
    cond_estimate_ = o.cond_estimate_;
    pivot_growth_ = o.pivot_growth_;
    clamped_ = o.clamped_;
    solves_.store(o.solves_.load(std::memory_order_relaxed), std::memory_order_relaxed);
    return *this;
}

/// Hager/Higham 1-norm power estimator for ||M^{-1}||_1, five iterations.
double estimate_inverse_one_norm(const Factorization& F) {
    const std::size_t n = F.n_;
    ComplexVector x(n, Complex(1.0 / static_cast<double>(n), 0.0));
    double est = 0.0;
    for (int it = 0; it < 5; ++it) {
        ComplexVector y = F.solve_impl(x, false);
        est = 0.0;
        for (const Complex& e : y) est += std::abs(e);
        ComplexVector xi(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double a = std::abs(y[i]);
            xi[i] = (a == 0.0) ? Complex(1.0, 0.0) : y[i] / a;
        }
        ComplexVector z = F.solve_impl(xi, true);
        std::size_t jbest = 0;
        double zbest = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double a = std::abs(z[j]);
            if (a > zbest) {
                zbest = a;
                jbest = j;
            }
        }
        if (it > 0 && zbest <= std::real(dot(z, x))) break;
        std::fill(x.begin(), x.end(), Complex(0.0, 0.0));
        x[jbest] = 1.0;
    }
    return est;
}

Factorization factorize(const ComplexMatrix& M, const FactorizeOptions& opts) {
    if (!M.is_square()) throw DimensionMismatchError("factorize: matrix is not square");
    const std::size_t n = M.rows();
    if (n == 0) throw DimensionMismatchError("factorize: empty matrix");
    check_finite(M, "factorize");

    Factorization F;
    F.n_ = n;
    F.lu_ = M.entries();
    F.piv_.resize(n);
    F.norm_frob_ = frobenius_norm(M);
    F.norm_one_ = one_norm(M);
    const double max_in = max_abs(M);
    // keep the floor positive so an exactly zero pivot is always caught
    const double pivot_floor = opts.pivot_rel_threshold * std::max(F.norm_frob_, 1e-300);

    Complex* lu = F.lu_.data();
    for (std::size_t k = 0; k < n; ++k) {
        // pivot search on |.|^2 down column k
        std::size_t p = k;
        double best = abs2(lu[k * n + k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double cand = abs2(lu[i * n + k]);
            if (cand > best) {
                best = cand;
                p = i;
            }
        }
        F.piv_[k] = p;
        if (p != k) std::swap_ranges(lu + k * n, lu + (k + 1) * n, lu + p * n);

        Complex piv = lu[k * n + k];
        const double apiv = std::abs(piv);
        if (apiv < pivot_floor) {
            if (!opts.clamp_tiny_pivots) {
                throw SingularMatrixError(
                    "factorize: pivot modulus " + std::to_string(apiv) + " at step " +
                        std::to_string(k) + " is below " + std::to_string(pivot_floor),
                    k, apiv);
            }
            piv = (apiv == 0.0) ? Complex(pivot_floor, 0.0) : piv * (pivot_floor / apiv);
            lu[k * n + k] = piv;
            F.clamped_ = true;
        }

        const Complex inv = 1.0 / piv;
        const Complex* rk = lu + k * n;
        for (std::size_t i = k + 1; i < n; ++i) {
            Complex* ri = lu + i * n;
            const Complex l = ri[k] * inv;
            ri[k] = l;
            if (l == 0.0) continue;
            const double lr = l.real(), li = l.imag();
            for (std::size_t j = k + 1; j < n; ++j) {
                const double ar = rk[j].real(), ai = rk[j].imag();
                ri[j] -= Complex(lr * ar - li * ai, lr * ai + li * ar);
            }
        }
    }

    double max_u = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) max_u = std::max(max_u, std::abs(lu[i * n + j]));
    F.pivot_growth_ = (max_in > 0.0) ? max_u / max_in : 0.0;

    g_factorizations.fetch_add(1, std::memory_order_relaxed);

    if (opts.estimate_condition) F.cond_estimate_ = estimate_inverse_one_norm(F) * F.norm_one_;
    return F;
}

ComplexVector Factorization::solve_impl(const ComplexVector& rhs, bool adjoint) const {
    const std::size_t n = n_;
    const Complex* lu = lu_.data();
    ComplexVector y(n);
    if (!adjoint) {
        y = rhs;
        for (std::size_t k = 0; k < n; ++k)
            if (piv_[k] != k) std::swap(y[k], y[piv_[k]]);
        // L y' = P rhs (unit lower triangular)
        for (std::size_t i = 1; i < n; ++i) {
            const Complex* ri = lu + i * n;
            double sr = y[i].real(), si = y[i].imag();
            for (std::size_t j = 0; j < i; ++j) {
                const double ar = ri[j].real(), ai = ri[j].imag();
                const double xr = y[j].real(), xi = y[j].imag();
                sr -= ar * xr - ai * xi;
                si -= ar * xi + ai * xr;
            }
            y[i] = Complex(sr, si);
        }
        // U y = y'
        for (std::size_t ii = n; ii-- > 0;) {
            const Complex* ri = lu + ii * n;
            double sr = y[ii].real(), si = y[ii].imag();
            for (std::size_t j = ii + 1; j < n; ++j) {
                const double ar = ri[j].real(), ai = ri[j].imag();
                const double xr = y[j].real(), xi = y[j].imag();
                sr -= ar * xr - ai * xi;
                si -= ar * xi + ai * xr;
            }
            y[ii] = Complex(sr, si) / ri[ii];
        }
    } else {
        // M^H y = rhs with P M = L U:  U^H w = rhs, L^H t = w, y = P^T t.
        for (std::size_t i = 0; i < n; ++i) {
            Complex s = rhs[i];
            for (std::size_t j = 0; j < i; ++j) s -= std::conj(lu[j * n + i]) * y[j];
            y[i] = s / std::conj(lu[i * n + i]);
        }
        for (std::size_t ii = n; ii-- > 0;) {
            Complex s = y[ii];
            for (std::size_t j = ii + 1; j < n; ++j) s -= std::conj(lu[j * n + ii]) * y[j];
            y[ii] = s;
        }
        for (std::size_t kk = n; kk-- > 0;)
            if (piv_[kk] != kk) std::swap(y[kk], y[piv_[kk]]);
    }
    return y;
}

ComplexVector Factorization::solve(const ComplexVector& rhs) const {
    if (rhs.empty() || rhs.size() != n_)
        throw DimensionMismatchError("solve: rhs length does not match factorization");
    solves_.fetch_add(1, std::memory_order_relaxed);
    g_solves.fetch_add(1, std::memory_order_relaxed);
    return solve_impl(rhs, false);
}

ComplexVector Factorization::solve_adjoint(const ComplexVector& rhs) const {
    if (rhs.empty() || rhs.size() != n_)
        throw DimensionMismatchError("solve_adjoint: rhs length does not match factorization");
    solves_.fetch_add(1, std::memory_order_relaxed);
    g_solves.fetch_add(1, std::memory_order_relaxed);
    return solve_impl(rhs, true);
}

ComplexMatrix Factorization::reconstruct() const {
    const std::size_t n = n_;
    ComplexMatrix R(n, n);
    // R = L U
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            Complex s = (i <= j) ? lu_[i * n + j] : Complex(0.0, 0.0);
            const std::size_t kmax = std::min(i, j + 1);
            for (std::size_t k = 0; k < kmax; ++k) s += lu_[i * n + k] * lu_[k * n + j];
            R(i, j) = s;
        }
    }
    // undo the row swaps: rows were swapped in order k = 0..n-1, invert in reverse
    for (std::size_t kk = n; kk-- > 0;) {
        if (piv_[kk] != kk)
            std::swap_ranges(R.row(kk), R.row(kk) + n, R.row(piv_[kk]));
    }
    return R;
}

}  // namespace defdist::linalg

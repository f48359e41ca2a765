#pragma once

#include <atomic>
#include <cstdint>
#include <vector>

#include "defdist/complex_matrix.hpp"

namespace defdist::linalg {

struct FactorizeOptions {
    /// A pivot with modulus below pivot_rel_threshold * ||M||_F is treated
    /// as zero: factorize throws SingularMatrixError, unless
    /// clamp_tiny_pivots is set, in which case the pivot is replaced by the
    /// threshold value (phase preserved). Clamping is the inverse-iteration
    /// mode: solves against a numerically singular matrix then blow up in
    /// the null direction instead of failing.
    double pivot_rel_threshold = 1e-14;
    bool clamp_tiny_pivots = false;
    /// Estimate the 1-norm condition number (5-step power estimator).
    bool estimate_condition = true;
};

/// Row-pivoted LU factorization of a general complex square matrix.
/// One factorization serves any number of solves with M and M^H; a
/// Factorization is immutable after construction except for its solve
/// counter, so concurrent read-only solves are safe.
class Factorization {
public:
    std::size_t dim() const { return n_; }

    /// Solves M y = rhs. Residual contract:
    /// ||M y - rhs||_2 <= 1e-10 (||M||_F ||y||_2 + ||rhs||_2).
    ComplexVector solve(const ComplexVector& rhs) const;

    /// Solves M^H y = rhs with the same factors.
    ComplexVector solve_adjoint(const ComplexVector& rhs) const;

    /// 1-norm condition estimate (0 when not requested at factorize time).
    double condition_estimate() const { return cond_estimate_; }
    /// max |U entry| / max |M entry|.
    double pivot_growth() const { return pivot_growth_; }
    double input_frobenius() const { return norm_frob_; }
    bool pivots_clamped() const { return clamped_; }

    /// Solves issued through this object (API-level calls only).
    std::uint64_t solve_count() const { return solves_.load(std::memory_order_relaxed); }

    /// Recombines P^{-1} L U; used to verify the factorization against the
    /// input matrix. O(n^3), intended for small n.
    ComplexMatrix reconstruct() const;

    Factorization(Factorization&& o) noexcept;
    Factorization& operator=(Factorization&& o) noexcept;
    Factorization(const Factorization&) = delete;
    Factorization& operator=(const Factorization&) = delete;

private:
    Factorization() = default;
    friend Factorization factorize(const ComplexMatrix&, const FactorizeOptions&);
    friend double estimate_inverse_one_norm(const Factorization&);

    ComplexVector solve_impl(const ComplexVector& rhs, bool adjoint) const;

    std::size_t n_ = 0;
    ComplexVector lu_;           // row-major factors, L unit-diagonal below, U on and above
    std::vector<std::size_t> piv_;  // row swapped with row k at step k
    double norm_frob_ = 0.0;
    double norm_one_ = 0.0;
    double cond_estimate_ = 0.0;
    double pivot_growth_ = 0.0;
    bool clamped_ = false;
    mutable std::atomic<std::uint64_t> solves_{0};
};

/// Factorizes a square complex matrix. Throws SingularMatrixError when a
/// pivot falls below the relative threshold (unless clamping is enabled)
/// and NonFiniteError on NaN/Inf input.
Factorization factorize(const ComplexMatrix& M, const FactorizeOptions& opts = {});

/// Process-wide counters over API-level factorize/solve calls. Internal
/// solves (e.g. the condition estimator) are not counted.
std::uint64_t factorization_count();
std::uint64_t solve_count();
void reset_counters();

}  // namespace defdist::linalg

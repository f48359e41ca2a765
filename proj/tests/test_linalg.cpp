#include <algorithm>
#include <cstring>
#include <thread>

#include "doctest.h"

#include "defdist/eigenvalues.hpp"
#include "defdist/errors.hpp"
#include "defdist/factorization.hpp"
#include "defdist/gallery.hpp"
#include "defdist/singular_triplet.hpp"
#include "test_support.hpp"

using namespace defdist;
using namespace defdist::linalg;
using test_support::random_complex_matrix;
using test_support::random_complex_vector;

TEST_SUITE("linalg") {

TEST_CASE("factorize: 1x1 scalar") {
    ComplexMatrix M(1, 1);
    M(0, 0) = 2.0;
    Factorization F = factorize(M);
    ComplexMatrix R = F.reconstruct();
    CHECK(R(0, 0) == Complex(2.0, 0.0));
    ComplexVector y = F.solve({Complex(4.0, 0.0)});
    CHECK(y[0] == Complex(2.0, 0.0));
}

TEST_CASE("factorize: 2x2 identity solve is the identity map") {
    Factorization F = factorize(identity(2));
    ComplexVector rhs{Complex(3.0, -1.0), Complex(0.5, 2.0)};
    ComplexVector y = F.solve(rhs);
    CHECK(y[0] == rhs[0]);
    CHECK(y[1] == rhs[1]);
}

TEST_CASE("factorize: 2x2 permutation requires pivoting") {
    ComplexMatrix M(2, 2);
    M(0, 1) = 1.0;
    M(1, 0) = 1.0;
    Factorization F = factorize(M);
    ComplexVector y = F.solve({Complex(7.0, 1.0), Complex(-2.0, 3.0)});
    CHECK(y[0] == Complex(-2.0, 3.0));
    CHECK(y[1] == Complex(7.0, 1.0));
}

TEST_CASE("factorize: reconstruction round-trip on random matrices") {
    auto gen = test_support::rng(101);
    for (std::size_t n : {1, 2, 3, 5, 8, 13, 20}) {
        ComplexMatrix M = random_complex_matrix(n, gen);
        Factorization F = factorize(M);
        ComplexMatrix R = F.reconstruct();
        double err = 0.0;
        for (std::size_t i = 0; i < n * n; ++i) err += std::norm(R.entries()[i] - M.entries()[i]);
        CHECK(std::sqrt(err) <= 1e-12 * frobenius_norm(M));
    }
}

TEST_CASE("solve: residual contract on 100 random systems") {
    auto gen = test_support::rng(202);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 17);
        ComplexMatrix M = random_complex_matrix(n, gen);
        ComplexVector rhs = random_complex_vector(n, gen);
        Factorization F = factorize(M);
        ComplexVector y = F.solve(rhs);
        ComplexVector My = matvec(M, y);
        double rn = 0.0;
        for (std::size_t i = 0; i < n; ++i) rn += std::norm(My[i] - rhs[i]);
        CHECK(std::sqrt(rn) <= 1e-10 * (frobenius_norm(M) * norm2(y) + norm2(rhs)));
    }
}

TEST_CASE("solve: diagonal and constructed solutions") {
    ComplexMatrix D(2, 2);
    D(0, 0) = 1.0;
    D(1, 1) = 2.0;
    ComplexVector y = factorize(D).solve({Complex(3.0, 0.0), Complex(8.0, 0.0)});
    CHECK(y[0].real() == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(y[1].real() == doctest::Approx(4.0).epsilon(1e-14));

    auto gen = test_support::rng(303);
    ComplexMatrix M = random_complex_matrix(3, gen);
    ComplexVector ones(3, Complex(1.0, 0.0));
    ComplexVector rhs = matvec(M, ones);
    ComplexVector x = factorize(M).solve(rhs);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(x[i] - 1.0) <= 1e-10);
}

TEST_CASE("solve_adjoint solves M^H y = rhs") {
    auto gen = test_support::rng(404);
    ComplexMatrix M = random_complex_matrix(6, gen);
    ComplexVector rhs = random_complex_vector(6, gen);
    ComplexVector y = factorize(M).solve_adjoint(rhs);
    ComplexVector r = adjoint_matvec(M, y);
    double rn = 0.0;
    for (std::size_t i = 0; i < 6; ++i) rn += std::norm(r[i] - rhs[i]);
    CHECK(std::sqrt(rn) <= 1e-10 * (frobenius_norm(M) * norm2(y) + norm2(rhs)));
}

TEST_CASE("factorize: errors") {
    ComplexMatrix Z(3, 3);  // exactly singular (zero matrix)
    CHECK_THROWS_AS(factorize(Z), SingularMatrixError);

    ComplexMatrix S(2, 2);  // rank one
    S(0, 0) = 1.0;
    S(0, 1) = 2.0;
    S(1, 0) = 0.5;
    S(1, 1) = 1.0;
    CHECK_THROWS_AS(factorize(S), SingularMatrixError);

    ComplexMatrix N(2, 2);
    N(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(factorize(N), NonFiniteError);

    ComplexMatrix R(2, 3);
    CHECK_THROWS_AS(factorize(R), DimensionMismatchError);

    Factorization F = factorize(identity(3));
    CHECK_THROWS_AS(F.solve(ComplexVector(2)), DimensionMismatchError);
    CHECK_THROWS_AS(F.solve(ComplexVector()), DimensionMismatchError);
}

TEST_CASE("factorize: clamped mode accepts a singular matrix") {
    ComplexMatrix S(2, 2);  // rank one
    S(0, 0) = 1.0;
    S(0, 1) = 2.0;
    S(1, 0) = 0.5;
    S(1, 1) = 1.0;
    FactorizeOptions fo;
    fo.clamp_tiny_pivots = true;
    Factorization F = factorize(S, fo);
    CHECK(F.pivots_clamped());
}

TEST_CASE("condition estimate tracks diagonal conditioning") {
    ComplexMatrix D(3, 3);
    D(0, 0) = 1.0;
    D(1, 1) = 1e-3;
    D(2, 2) = 1.0;
    Factorization F = factorize(D);
    CHECK(F.condition_estimate() >= 1e3);
    CHECK(F.condition_estimate() <= 1e4);
}

TEST_CASE("counters: factorize and solve increment") {
    const auto f0 = factorization_count();
    const auto s0 = solve_count();
    Factorization F = factorize(identity(4));
    F.solve(ComplexVector(4, Complex(1.0, 0.0)));
    F.solve_adjoint(ComplexVector(4, Complex(1.0, 0.0)));
    CHECK(factorization_count() - f0 == 1);
    CHECK(solve_count() - s0 == 2);
    CHECK(F.solve_count() == 2);
}

TEST_CASE("concurrent read-only solves are safe and deterministic") {
    auto gen = test_support::rng(909);
    ComplexMatrix M = random_complex_matrix(12, gen);
    Factorization F = factorize(M);
    std::vector<ComplexVector> rhs;
    for (int i = 0; i < 40; ++i) rhs.push_back(random_complex_vector(12, gen));
    std::vector<ComplexVector> serial;
    for (const auto& b : rhs) serial.push_back(F.solve(b));

    std::vector<ComplexVector> parallel(rhs.size());
    std::thread worker([&] {
        for (std::size_t i = 0; i < rhs.size(); i += 2) parallel[i] = F.solve(rhs[i]);
    });
    for (std::size_t i = 1; i < rhs.size(); i += 2) parallel[i] = F.solve(rhs[i]);
    worker.join();
    for (std::size_t i = 0; i < rhs.size(); ++i) CHECK(parallel[i] == serial[i]);
    CHECK(F.solve_count() == 2 * rhs.size());
}

TEST_CASE("smallest_singular_triplet: identity and diagonal") {
    SingularTriplet t = smallest_singular_triplet(identity(2));
    CHECK(t.sigma == doctest::Approx(1.0).epsilon(1e-12));

    ComplexMatrix D(3, 3);
    D(0, 0) = 3.0;
    D(1, 1) = 1.0;
    D(2, 2) = 2.0;
    t = smallest_singular_triplet(D);
    CHECK(t.sigma == doctest::Approx(1.0).epsilon(1e-12));
    // u = v = e2 up to the phase convention (largest entry real positive)
    CHECK(std::abs(t.v[1] - 1.0) <= 1e-10);
    CHECK(std::abs(t.u[1] - 1.0) <= 1e-10);
    CHECK(std::abs(t.v[0]) <= 1e-10);
    CHECK(std::abs(t.v[2]) <= 1e-10);
}

TEST_CASE("smallest_singular_triplet: Kahan(6) start value") {
    SingularTriplet t = smallest_singular_triplet(gallery::kahan(6, 0.1));
    CHECK(std::abs(t.sigma - 9.9694e-03) <= 1e-7);
}

TEST_CASE("smallest_singular_triplet: residual and normalization invariants") {
    auto gen = test_support::rng(505);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 6);
        ComplexMatrix B = random_complex_matrix(n, gen);
        SingularTriplet t = smallest_singular_triplet(B);
        CHECK(std::abs(norm2(t.u) - 1.0) <= 1e-14);
        CHECK(std::abs(norm2(t.v) - 1.0) <= 1e-14);
        ComplexVector bv = matvec(B, t.v);
        ComplexVector bhu = adjoint_matvec(B, t.u);
        double r1 = 0.0, r2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            r1 += std::norm(bv[i] - t.sigma * t.u[i]);
            r2 += std::norm(bhu[i] - t.sigma * t.v[i]);
        }
        const double nb = frobenius_norm(B);
        CHECK(std::sqrt(r1) <= 1e-10 * nb);
        CHECK(std::sqrt(r2) <= 1e-10 * nb);
        // phase convention: largest-modulus entry of v real positive
        std::size_t idx = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::abs(t.v[i]) > std::abs(t.v[idx])) idx = i;
        CHECK(t.v[idx].imag() == 0.0);
        CHECK(t.v[idx].real() > 0.0);
    }
}

TEST_CASE("smallest_singular_triplet: agrees with the eigenvalue oracle") {
    auto gen = test_support::rng(606);
    for (int trial = 0; trial < 6; ++trial) {
        ComplexMatrix B = random_complex_matrix(5, gen);
        SingularTriplet t = smallest_singular_triplet(B);
        // oracle: sqrt of the smallest eigenvalue of B^H B
        ComplexMatrix BtB = conj_transpose(B) * B;
        auto evs = eigenvalues_diagnostic(BtB);
        double smallest = std::numeric_limits<double>::infinity();
        for (const Complex& e : evs) smallest = std::min(smallest, std::abs(e.real()));
        const double oracle = std::sqrt(smallest);
        CHECK(std::abs(t.sigma - oracle) <= 1e-8 * std::max(1.0, oracle));
    }
}

TEST_CASE("smallest_singular_triplet: deterministic bitwise") {
    ComplexMatrix B = gallery::grcar(7);
    SingularTriplet a = smallest_singular_triplet(B);
    SingularTriplet b = smallest_singular_triplet(B);
    CHECK(std::memcmp(&a.sigma, &b.sigma, sizeof(double)) == 0);
    CHECK(std::memcmp(a.u.data(), b.u.data(), a.u.size() * sizeof(Complex)) == 0);
    CHECK(std::memcmp(a.v.data(), b.v.data(), a.v.size() * sizeof(Complex)) == 0);
}

TEST_CASE("smallest_singular_triplet: numerically singular input") {
    // sigma_min = 0 exactly; the clamped factorization must cope
    ComplexMatrix B(2, 2);
    B(0, 1) = 1.0;
    SingularTriplet t = smallest_singular_triplet(B);
    CHECK(t.sigma <= 1e-12);
}

TEST_CASE("eigenvalues_diagnostic: upper triangular equals diagonal") {
    ComplexMatrix T(3, 3);
    T(0, 0) = Complex(1.0, 2.0);
    T(0, 1) = 5.0;
    T(0, 2) = -3.0;
    T(1, 1) = Complex(-2.0, 0.5);
    T(1, 2) = 7.0;
    T(2, 2) = 4.0;
    auto evs = eigenvalues_diagnostic(T);
    std::sort(evs.begin(), evs.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
    CHECK(std::abs(evs[0] - Complex(-2.0, 0.5)) <= 1e-12);
    CHECK(std::abs(evs[1] - Complex(1.0, 2.0)) <= 1e-12);
    CHECK(std::abs(evs[2] - Complex(4.0, 0.0)) <= 1e-12);
}

TEST_CASE("eigenvalues_diagnostic: Kahan(6) coalescing pair values") {
    auto evs = eigenvalues_diagnostic(gallery::kahan(6, 0.1));
    auto contains = [&](double target) {
        for (const Complex& e : evs)
            if (std::abs(e - target) <= 1e-4) return true;
        return false;
    };
    CHECK(contains(1.5849e-01));
    CHECK(contains(1.0e-01));
}

TEST_CASE("eigenvalues_diagnostic: tiny coupled 2x2") {
    // [[0,1],[delta,0]] has eigenvalues +-sqrt(delta)
    ComplexMatrix B(2, 2);
    B(0, 1) = 1.0;
    B(1, 0) = 1e-6;
    auto evs = eigenvalues_diagnostic(B);
    std::sort(evs.begin(), evs.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
    CHECK(std::abs(evs[0] + 1e-3) <= 1e-12);
    CHECK(std::abs(evs[1] - 1e-3) <= 1e-12);
}

TEST_CASE("eigenvalues_diagnostic: trace consistency on random matrices") {
    auto gen = test_support::rng(707);
    for (int trial = 0; trial < 4; ++trial) {
        const std::size_t n = 4 + static_cast<std::size_t>(2 * trial);
        ComplexMatrix B = random_complex_matrix(n, gen);
        auto evs = eigenvalues_diagnostic(B);
        CHECK(evs.size() == n);
        Complex tr(0.0, 0.0), sum(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) tr += B(i, i);
        for (const Complex& e : evs) sum += e;
        CHECK(std::abs(tr - sum) <=
              1e-7 * static_cast<double>(n) * std::max(1.0, frobenius_norm(B)));
    }
}

TEST_CASE("eigenvalues_diagnostic: dimension cap") {
    ComplexMatrix big(kDiagnosticDimCap + 1, kDiagnosticDimCap + 1);
    CHECK_THROWS_AS(eigenvalues_diagnostic(big), BadParameterError);
}

}  // TEST_SUITE
